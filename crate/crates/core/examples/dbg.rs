// find the first instance where the search exceeds the cylinder set
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use spongedim::orderings::*;
use spongedim::projection::Perm;
use spongedim::synth::*;
use std::collections::BTreeSet;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let light = SearchConfig {
        max_prefix_len: 9,
        scale_grid_size: 8,
        raw_word_budget: 128,
        eval_budget: 60_000,
    };
    for case in 0..1000 {
        let cfg = SynthConfig {
            distinct_ratios_within_map: true,
            ..SynthConfig::new(2 + case % 2, 2 + case % 2)
        };
        let sys = nondegenerate_sponge(&cfg, &mut rng, 0.05);
        let cyl: BTreeSet<Perm> = Perm::all(sys.dimension())
            .into_iter()
            .filter(|s| matches!(cylinder_membership(&sys, s), Ok(Some(_))))
            .collect();
        let found = search_cube_witnesses(&sys, &light);
        for (sigma, (w, r)) in &found {
            if !cyl.contains(sigma) {
                println!("case {case}: sigma {} beyond cylinder set {:?}", sigma.display(),
                    cyl.iter().map(|s| s.display()).collect::<Vec<_>>());
                println!("{}", sys.describe());
                println!("witness word {w} at scale {r}");
                println!("scan (denom 200): {:?}", scan_feasibility(&sys, sigma, 200).is_some());
                let stops = spongedim::words::stopping_vector(&sys, w, r);
                println!("stops {:?}", stops);
                return;
            }
        }
    }
    println!("no violation found");
}
