use kporo::covering::TranslationInstance;
use kporo::dimension::const_cprime;
use kporo::geometry::{add_scaled, dot, norm, sub};

fn main() {
    let i: u64 = 97629;
    let seed: u64 = 20250811;
    let n = if i % 2 == 0 { 2 } else { 3 };
    let inst = TranslationInstance::random(n, seed.wrapping_add(i)).unwrap();
    println!("n={} m={} alpha={} beta={} delta={} c={}", n, inst.v.dim(), inst.alpha, inst.beta, inst.delta, inst.c);
    let proj = inst.v.project_vec(inst.theta.coords());
    println!("|proj theta| = {} vs c = {}", norm(&proj), inst.c);
    // rerun check with manual loop to find the violating sample
    let cprime = const_cprime(inst.alpha, inst.c).unwrap();
    let plen = norm(&proj);
    let tp: Vec<f64> = proj.iter().map(|t| t / plen).collect();
    let tilted = add_scaled(inst.x.coords(), cprime * inst.beta, &tp);
    let straight = add_scaled(inst.x.coords(), inst.delta, inst.theta.coords());
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ i);
    for t in 0..12 {
        let base = &inst.points[rng.gen_range(0..inst.points.len())];
        let off = loop {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if dot(&v, &v) <= 1.0 { break v.into_iter().map(|c| c * inst.beta).collect::<Vec<f64>>(); }
        };
        let q = add_scaled(base.coords(), 1.0, &off);
        let d_tilt = dot(&sub(&q, &tilted), &tp);
        let d_straight = dot(&sub(&q, &straight), inst.theta.coords());
        if d_tilt > 0.0 && d_straight <= 0.0 {
            println!("VIOLATION at trial {t}: depth_tilted={d_tilt:.6e} depth_straight={d_straight:.6e}");
            println!("  q = {q:?}");
            println!("  cprime = {cprime}, cprime*beta = {}", cprime * inst.beta);
            println!("  |q − x| = {}", norm(&sub(&q, inst.x.coords())));
            let dist_p = inst.points.iter().map(|p| norm(&sub(&q, p.coords()))).fold(f64::INFINITY, f64::min);
            println!("  dist(q, P) = {} vs beta = {}", dist_p, inst.beta);
        }
    }
}
