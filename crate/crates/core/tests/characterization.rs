use symext::extend::{solve_bosonic_k2_generic, SolverConfig};
use symext::fixtures::{peeling_residual_bound, qutrit_marginal};

/// Records the two-copy bosonic verdict for equal coefficients; the outcome is
/// printed, not asserted.
#[test]
fn equal_coefficient_qutrit_verdict() {
    let e = 1.0 / 3f64.sqrt();
    let rho = qutrit_marginal([e, e, e]).unwrap();
    let r = solve_bosonic_k2_generic(&rho, 3, &SolverConfig::default()).unwrap();
    println!("peeling bound {:.6}", peeling_residual_bound([e, e, e]));
    print!("{}", r.to_text(None));
}
