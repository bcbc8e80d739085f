//! Test-only oracles, independent of the LP path they check.
#![allow(dead_code)]

use fxbell::rng::SplitMix64;

pub type Pair = (i8, i8);

/// Pairs a triple (x, y, z) takes from segments 1, 2 and 3.
fn triple_pairs(x: i8, y: i8, z: i8) -> [Pair; 3] {
    [(x, y), (x, z), (y, z)]
}

fn slot(p: Pair) -> usize {
    match p {
        (1, 1) => 0,
        (1, -1) => 1,
        (-1, 1) => 2,
        (-1, -1) => 3,
        _ => unreachable!(),
    }
}

/// Maximum number of triples by exhaustive search over integer pattern
/// counts.
pub fn max_triples_by_counts(segments: &[Vec<Pair>; 3]) -> u64 {
    let mut remaining = [[0i64; 4]; 3];
    for (k, seg) in segments.iter().enumerate() {
        for p in seg {
            remaining[k][slot(*p)] += 1;
        }
    }
    let mut patterns = Vec::new();
    for x in [1i8, -1] {
        for y in [1i8, -1] {
            for z in [1i8, -1] {
                patterns.push(triple_pairs(x, y, z).map(slot));
            }
        }
    }
    fn go(i: usize, patterns: &[[usize; 3]], rem: &mut [[i64; 4]; 3]) -> i64 {
        if i == patterns.len() {
            return 0;
        }
        let pat = patterns[i];
        let cap = (0..3).map(|k| rem[k][pat[k]]).min().unwrap();
        let mut best = 0;
        for t in 0..=cap {
            for k in 0..3 {
                rem[k][pat[k]] -= t;
            }
            best = best.max(t + go(i + 1, patterns, rem));
            for k in 0..3 {
                rem[k][pat[k]] += t;
            }
        }
        best
    }
    go(0, &patterns, &mut remaining) as u64
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Maximum number of triples by trying every reshuffling of segments 2 and 3
/// against segment 1. Cost O(N!²·N).
pub fn max_triples_by_permutation(segments: &[Vec<Pair>; 3]) -> u64 {
    let n = segments[0].len();
    let perms = permutations(n);
    let mut best = 0;
    for s2 in &perms {
        for s3 in &perms {
            let count = (0..n)
                .filter(|&i| {
                    let (x, y) = segments[0][i];
                    let (x2, z) = segments[1][s2[i]];
                    let (y3, z3) = segments[2][s3[i]];
                    x == x2 && y == y3 && z == z3
                })
                .count() as u64;
            best = best.max(count);
        }
    }
    best
}

/// Random ±1 pairs with a per-segment random outcome distribution, so that
/// instances range from uniform to strongly biased.
pub fn random_instance(rng: &mut SplitMix64, n: usize) -> [Vec<Pair>; 3] {
    const OUT: [Pair; 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    std::array::from_fn(|_| {
        let w: Vec<f64> = (0..4).map(|_| rng.next_f64()).collect();
        let total: f64 = w.iter().sum();
        (0..n)
            .map(|_| {
                let mut u = rng.next_f64() * total;
                for (i, wi) in w.iter().enumerate() {
                    if u < *wi {
                        return OUT[i];
                    }
                    u -= wi;
                }
                OUT[3]
            })
            .collect()
    })
}

pub fn correlation(pairs: &[Pair]) -> f64 {
    pairs.iter().map(|(a, b)| f64::from(a * b)).sum::<f64>() / pairs.len() as f64
}
