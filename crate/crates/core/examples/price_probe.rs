use mssvcj_core::*;
fn main() {
    let chain = msvol::ChainSpec::from_variances(
        &[0.02, 0.04, 0.06, 0.08],
        vec![
            vec![0.70, 0.15, 0.10, 0.05],
            vec![0.03, 0.90, 0.06, 0.01],
            vec![0.05, 0.05, 0.85, 0.05],
            vec![0.03, 0.07, 0.10, 0.80],
        ],
        0.25 / 30.0,
        1,
    ).unwrap();
    let market = european::MarketSpec::call(50.0, 55.0, 0.05, 0.0, 0.25).unwrap();
    let jumps = jumps::JumpSpec::new(3.0, -0.025, 0.005, 5.5e-5).unwrap();
    let pea = jumps::PeaSpec::new(2.0, 250.0, 0.02).unwrap();
    let t0 = std::time::Instant::now();
    let r = european::price_ms_svcj(&market, &chain, &jumps, &pea, &model::Numerics::default()).unwrap();
    let dt = t0.elapsed();
    println!("price = {:.6}  delta = {:.6}  dropped = {:.3e}  elapsed = {:?}", r.price, r.delta, r.truncation_mass_dropped, dt);
    let sigma = european::implied_vol(r.price, &market).unwrap();
    println!("implied vol = {:.4}", sigma);
}
