//! Exact spread by enumerating live-edge worlds, and the augmentation
//! identity that AIS builds on.

use ima::diffusion::{exact_augmented_identity_check, exact_spread};
use ima::{CandidateEdge, Graph, SeedSet};

fn main() -> ima::Result<()> {
    let g = Graph::from_edges(5, &[(0, 1, 0.5), (1, 2, 0.5), (3, 4, 0.8), (2, 4, 0.3)])?;
    let s = SeedSet::new(5, [0])?;
    println!("sigma(S)           = {:.6}", exact_spread(&g, &[], &s)?);

    let e = CandidateEdge::new(0, 3, 0.6);
    println!("sigma(S) with 0->3 = {:.6}", exact_spread(&g, &[e], &s)?);

    let (lhs, rhs) = exact_augmented_identity_check(&g, &[], &s, e)?;
    println!("identity: {lhs:.12} vs {rhs:.12}");
    Ok(())
}
