//! Fixtures shared by the kernel benchmarks.

use pdpoly::scenario::Scenario;

/// Bipartite scenario with `m` binary-output inputs per party.
pub fn bipartite(m: usize) -> Scenario {
    Scenario::uniform(&[m, m], 2).expect("valid scenario")
}

/// Three parties with two binary-output inputs each.
pub fn tripartite() -> Scenario {
    Scenario::uniform(&[2, 2, 2], 2).expect("valid scenario")
}
