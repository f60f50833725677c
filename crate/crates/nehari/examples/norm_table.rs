use nehari::synthesis::level_norms;
use nehari_core::bump::BumpProfile;

fn main() {
    let p = BumpProfile::new(2).unwrap();
    for (n, pad) in [(128, 4), (256, 8), (512, 8), (256, 16)] {
        let t = std::time::Instant::now();
        let l = level_norms(&p, n, pad).unwrap();
        println!("{n} {pad}: l1h {:.12} l2h {:.12} l2t {:.12} l1t {:.12} l1w {:.12} b0 {:.12} decay {:?} tails {:?} ({:?})", l.l1_hat, l.l2sq_hat, l.l2sq_time, l.l1_time, l.l1_weighted, l.b0, l.decay, l.tails, t.elapsed());
    }
}
