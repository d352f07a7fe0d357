//! Building a parity-check matrix from a degree distribution.

use cvqkd::recon::{peg_construct, DegreeDistribution};

fn main() -> cvqkd::Result<()> {
    let dist = DegreeDistribution::regular(3, 6)?;
    let h = peg_construct(&dist, 96, 1)?;
    println!("{} checks x {} variables, rate {:.3}, {} edges", h.n_checks(), h.n_vars(), h.code_rate(), h.n_edges());
    print!("{}", h.to_alist());
    Ok(())
}
