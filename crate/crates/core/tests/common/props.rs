use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dpm_core::engine::SolveOptions;
use dpm_core::feature::{LeafSet, NodeId, Store};
use dpm_core::hebrew;
use dpm_core::iop::{self, compare_marks, disharmony};
use dpm_core::language::Fragment;
use dpm_core::prosody::{roles_regular, Mark, Role};

fn random_op(store: &mut Store, rng: &mut ChaCha8Rng, nodes: &mut Vec<NodeId>) {
    let d = store.domain().clone();
    let dims = [
        "sort", "role", "ini", "fin", "prom", "mark", "seg", "cat", "sem",
    ];
    let feats = [
        "self", "left", "right", "cat", "mark", "seg", "prom", "first", "rest", "sem",
    ];
    let pick = |rng: &mut ChaCha8Rng, nodes: &[NodeId]| nodes[rng.gen_range(0..nodes.len())];
    match rng.gen_range(0..4) {
        0 => nodes.push(store.fresh()),
        1 => {
            let dim = d.dimension(dims[rng.gen_range(0..dims.len())]).unwrap();
            let size = d.dim_size(dim);
            let set = LeafSet::from_leaves((0..size).filter(|_| rng.gen_bool(0.6)));
            let n = pick(rng, nodes);
            store.constrain(n, dim, set);
        }
        2 => {
            let f = d.feature(feats[rng.gen_range(0..feats.len())]).unwrap();
            let n = pick(rng, nodes);
            if let Some(m) = store.feature(n, f) {
                nodes.push(m);
            }
        }
        _ => {
            let a = pick(rng, nodes);
            let b = pick(rng, nodes);
            store.unify(a, b);
        }
    }
}

/// Random checkpoint/mutate/rollback rounds on one growing store, each
/// compared against a structural snapshot.
pub fn rollback_rounds(rounds: usize) {
    let domain = hebrew::grammar().unwrap().domain().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut store = Store::new(domain);
    let mut nodes = vec![store.fresh()];
    for round in 0..rounds {
        // Grow the base graph a little so later rounds start from richer states.
        for _ in 0..rng.gen_range(0..3) {
            random_op(&mut store, &mut rng, &mut nodes);
        }
        let before = store.snapshot();
        let kept = nodes.len();
        let cp = store.checkpoint();
        let inner_at = rng.gen_range(0..20);
        let mut inner = None;
        for i in 0..20 {
            if i == inner_at {
                inner = Some(store.checkpoint());
            }
            random_op(&mut store, &mut rng, &mut nodes);
        }
        if rng.gen_bool(0.5) {
            store.rollback(inner.unwrap());
        }
        store.rollback(cp);
        nodes.truncate(kept);
        assert_eq!(store.snapshot(), before, "round {round}");
    }
}

fn all_vectors(len: usize) -> Vec<Vec<Mark>> {
    (0..1u32 << len)
        .map(|bits| {
            (0..len)
                .map(|i| {
                    if bits >> (len - 1 - i) & 1 == 1 {
                        Mark::Marked
                    } else {
                        Mark::Unmarked
                    }
                })
                .collect()
        })
        .collect()
}

/// Exhaustive over all mark vectors up to `max` positions.
pub fn check_length_dominance(max: usize) {
    let by_len: Vec<Vec<(Vec<Mark>, BigUint)>> = (0..=max)
        .map(|n| {
            if n == 0 {
                return Vec::new();
            }
            all_vectors(n)
                .into_iter()
                .map(|v| {
                    let d = disharmony(&v);
                    (v, d)
                })
                .collect()
        })
        .collect();
    for n in 2..=max {
        let smallest_long = by_len[n].iter().map(|(_, d)| d).min().unwrap();
        for (m, shorter) in by_len.iter().enumerate().take(n).skip(1) {
            let largest_short = shorter.iter().map(|(_, d)| d).max().unwrap();
            assert!(largest_short < smallest_long, "length {m} vs {n}");
        }
        assert!(*smallest_long >= BigUint::from(4u32).pow(n as u32 - 1));
    }
    let flat: Vec<&(Vec<Mark>, BigUint)> = by_len.iter().flatten().collect();
    for (a, da) in &flat {
        for (b, db) in &flat {
            assert_eq!(compare_marks(a, b), da.cmp(db));
        }
    }
}

/// `(O N C?)*` by hand, kept apart from the library scanner.
pub fn syllabic(roles: &[Role]) -> bool {
    let s: String = roles
        .iter()
        .map(|r| match r {
            Role::Onset => 'O',
            Role::Nucleus => 'N',
            Role::Coda => 'C',
        })
        .collect();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let Some(r) = rest.strip_prefix("ON") else {
            return false;
        };
        rest = r.strip_prefix('C').unwrap_or(r);
    }
    true
}

/// Checks every candidate of every category tuple of both grammars and
/// returns how many there were.
pub fn check_role_regularity() -> usize {
    let mut checked = 0;
    for f in [Fragment::hebrew(), Fragment::tonkawa()] {
        for t in f.tuples() {
            let goal = f
                .generation_goal(None, &LeafSet::singleton(t), false)
                .unwrap();
            let (cands, _) =
                iop::candidates(&f.grammar, f.inventory, &goal, &SolveOptions::default());
            for c in cands {
                let roles: Option<Vec<Role>> = c.word.roles().into_iter().collect();
                let roles = roles.unwrap_or_else(|| panic!("{} has an unassigned role", c.surface));
                assert!(syllabic(&roles), "{} is not (ON C?)*", c.surface);
                assert_eq!(roles_regular(&roles), syllabic(&roles));
                checked += 1;
            }
        }
    }
    checked
}
