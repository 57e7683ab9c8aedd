//! Finds the pump mode superposition that maximizes biphoton detection at a
//! given off-axis direction, and compares it against the seeded brute-force
//! search.

use egh_spdc::optimizer::{brute_force_optimal, optimal_expansion, IndexSet, TargetDirection};

fn main() {
    let target = TargetDirection::new(0.2, 0.1);
    let max_order = 2;

    let closed = optimal_expansion(&target, max_order, IndexSet::AllNonzeroOrders);
    let brute = brute_force_optimal(&target, max_order, IndexSet::AllNonzeroOrders, 1)
        .expect("gradient ascent converges");

    println!("target X = {}, Y = {}", target.x, target.y);
    println!("closed-form objective: {:.12}", closed.objective);
    println!(
        "brute-force objective:  {:.12} ({} iterations)",
        brute.objective, brute.iterations
    );
    println!("optimal coefficients (n, m, re, im):");
    for (idx, c) in closed.expansion.iter() {
        println!("  ({}, {})  {:+.6e}  {:+.6e}", idx.n, idx.m, c.re, c.im);
    }
}
