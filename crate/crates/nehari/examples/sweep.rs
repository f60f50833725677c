use nehari::experiment::{run_ratio_sweep, ExperimentConfig};

fn main() {
    let t = std::time::Instant::now();
    let rep = run_ratio_sweep(&ExperimentConfig::default()).unwrap();
    for row in &rep.rows {
        match row.data() {
            Some(d) => println!(
                "k={} rc={:.4} r={:.4} l2={:.6e} l1={:.6e} sigma={:.6e} ratio={:.5} bound={:.5} tol={:.2e} dom={} rows={:?} ub={:?}",
                row.k, d.r_certified, d.r, d.l2sq_hat, d.l1_time.value, d.hankel_norm, d.ratio, d.analytic_bound, d.tolerance, d.dominates,
                d.blocks.iter().map(|b| b.rows).collect::<Vec<_>>(), d.blocks.iter().map(|b| b.upper_bound_ok).collect::<Vec<_>>()
            ),
            None => println!("k={} blocked {:?}", row.k, row.outcome),
        }
    }
    println!("elapsed {:?}", t.elapsed());
}
