use roadkpp::contour::*;
use roadkpp::model::*;
use std::time::Instant;
fn main() {
    let p = ModelParams::new(0.5, 1.0, 0.0, ReactionSpec::new(1.0).unwrap()).unwrap();
    let sym = SymbolP::from_params(&p);
    let r0 = p.derive().unwrap().r0;
    let spec = ContourSpec::default_for(&p).unwrap();
    let pref = asymptotic_prefactor(&p);
    println!("prefactor = {pref}");
    for (x, t) in [(100.0_f64, 50.0_f64), (300.0, 50.0), (1000.0, 50.0), (3000.0, 50.0), (1000.0, 20.0)] {
        let t0 = Instant::now();
        let j = eval_j(x, t, &spec, &sym, r0).unwrap();
        let scaled = t.powf(1.5) * x.powf(2.0) * j;
        println!("x={x:6} t={t:4}: t^1.5 x^2 J = {scaled:.6}  (ratio to pref {:.4})  [{} ms]",
                 scaled / pref, t0.elapsed().as_millis());
    }
}
