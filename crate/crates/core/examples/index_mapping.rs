//! How a layer permutation becomes a bit-index permutation, and what it does
//! to the frozen set.

use polar_perm::permutations::permute_code;
use polar_perm::{form_permutation_set, LayerPermutation, PolarCode};

fn main() -> polar_perm::Result<()> {
    let code = PolarCode::from_frozen_indices(8, &[0, 1, 2])?;
    for slots in [vec![0, 1, 2], vec![2, 1, 0], vec![1, 2, 0]] {
        let pi = LayerPermutation::new(slots)?;
        let map = pi.index_map();
        let permuted = permute_code(&code, &map)?;
        println!("layers [{pi}]");
        for i in 0..8 {
            println!("  {i:03b} -> {:03b}", map.forward()[i]);
        }
        println!("  frozen set {:?}", permuted.frozen_indices().collect::<Vec<_>>());
    }

    let a = LayerPermutation::new(vec![1, 2, 0])?;
    let b = LayerPermutation::new(vec![2, 1, 0])?;
    let ab = a.compose(&b)?;
    println!("[{a}] composed with [{b}] = [{ab}], inverse of [{a}] = [{}]", a.inverse());

    for k in 2..=5 {
        println!("k = {k}: {} candidates for n = 10", form_permutation_set(10, k)?.len());
    }
    Ok(())
}
