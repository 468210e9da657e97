//! Operator norm against cb norm for the transpose map, a random map and
//! a map read from JSON.

use opspace::cbmaps::{amplification_profile, cb_norm_detailed, dim_bound_check, norm_lower};
use opspace::LinearMatrixMap;
use rand::SeedableRng;

fn main() -> opspace::Result<()> {
    println!("transpose on M_n: norm stays 1, cb norm grows like n");
    for n in 2..=5 {
        let t = LinearMatrixMap::transpose(n);
        let cb = cb_norm_detailed(&t, 1e-9)?;
        println!(
            "  n = {n}: norm >= {:.6}  cb = {:.6} ({:?}, {} iterations)",
            norm_lower(&t, 16, 0),
            cb.value,
            cb.status,
            cb.iterations
        );
    }

    // ‖id_k ⊗ m‖ climbs with k and settles at the cb norm by k = n.
    let profile = amplification_profile(&LinearMatrixMap::transpose(3), 3, 16, 0)?;
    println!("amplification profile of transpose on M_3: {profile:.4?}");

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let m = LinearMatrixMap::random(3, 3, 4, &mut rng);
    let r = dim_bound_check(&m, 1e-9, 16, 0, 1e-3)?;
    println!(
        "random map on M_3: norm >= {:.4}, cb = {:.4}, cb/norm = {:.3} <= {}",
        r.norm_lb, r.cb, r.ratio, r.bound
    );

    // Maps also come from the Choi form.
    let json = r#"{"inDim": 2, "outDim": 2, "choi": {"rows": 4, "cols": 4,
        "re": [1,0,0,1, 0,0,0,0, 0,0,0,0, 1,0,0,1]}}"#;
    let m: LinearMatrixMap = serde_json::from_str(json).expect("valid map");
    println!("map from Choi matrix: cb = {:.6}", cb_norm_detailed(&m, 1e-9)?.value);
    Ok(())
}
