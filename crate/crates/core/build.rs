//! Writes the qutrit counterexample marginal into `OUT_DIR`.
//!
//! The state is `α(|012>-|021>) + β(|120>-|102>) + γ(|201>-|210>)` on
//! `A ⊗ B_1 ⊗ B_2` with `(α, β, γ) = (1, 2, 3)/√28`; the file holds
//! `Tr_{B_2}` of its projector on `A ⊗ B_1`.

use std::fmt::Write;

fn main() {
    let n = 28f64.sqrt();
    let (a, b, g) = (1.0 / n, 2.0 / n, 3.0 / n);
    let mut psi = [0.0f64; 27];
    for (digits, amp) in [([0, 1, 2], a), ([0, 2, 1], -a), ([1, 2, 0], b), ([1, 0, 2], -b), ([2, 0, 1], g), ([2, 1, 0], -g)] {
        psi[digits[0] * 9 + digits[1] * 3 + digits[2]] = amp;
    }
    let mut rho = [[0.0f64; 9]; 9];
    for (r, row) in rho.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            *entry = (0..3).map(|e| psi[r * 3 + e] * psi[c * 3 + e]).sum();
        }
    }

    let mut s = String::from("{\n  \"format_version\": 1,\n  \"kind\": \"state\",\n  \"layout\": [3, 3],\n  \"entries\": [\n");
    for (r, row) in rho.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            let sep = if r == 8 && c == 8 { "" } else { "," };
            let _ = writeln!(s, "    [{:.16e}, {:.16e}]{sep}", x, 0.0f64);
        }
    }
    s.push_str("  ],\n  \"metadata\": {\"provenance\": \"antisymmetric qutrit state (1,2,3)/sqrt(28), B_2 traced out\"}\n}\n");

    let out = std::path::PathBuf::from(std::env::var("OUT_DIR").expect("cargo sets OUT_DIR"));
    std::fs::write(out.join("qutrit_marginal.state"), s).expect("write fixture");
    println!("cargo:rerun-if-changed=build.rs");
}
