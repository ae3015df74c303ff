//! Algorithm runs checked against replays that only use the oracle's
//! answer function, plus the statistical properties of the oracle and the
//! greedy baseline.

use roundclique::cliquealg::{greedy_clique, run_algorithm, two_round_first_sets, Variant};
use roundclique::{EdgeKey, QueryOracle};

fn adj(o: &QueryOracle, vs: &[u32]) -> Vec<Vec<bool>> {
    let k = vs.len();
    let mut a = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let e = o.answer(EdgeKey::ordered(vs[i], vs[j]));
            a[i][j] = e;
            a[j][i] = e;
        }
    }
    a
}

/// Bron–Kerbosch with pivoting; returns the clique number.
fn clique_number(a: &[Vec<bool>]) -> usize {
    fn bk(a: &[Vec<bool>], r: usize, p: Vec<usize>, x: Vec<usize>, best: &mut usize) {
        if p.is_empty() {
            if x.is_empty() {
                *best = (*best).max(r);
            }
            return;
        }
        if r + p.len() <= *best {
            return;
        }
        let u = *p.iter().chain(&x).max_by_key(|&&u| p.iter().filter(|&&v| a[u][v]).count()).unwrap();
        let mut p = p;
        let mut x = x;
        for v in p.clone().into_iter().filter(|&v| !a[u][v]) {
            let np: Vec<usize> = p.iter().copied().filter(|&w| a[v][w]).collect();
            let nx: Vec<usize> = x.iter().copied().filter(|&w| a[v][w]).collect();
            bk(a, r + 1, np, nx, best);
            p.retain(|&w| w != v);
            x.push(v);
        }
    }
    let mut best = 0;
    bk(a, 0, (0..a.len()).collect(), Vec::new(), &mut best);
    best
}

fn median(mut v: Vec<usize>) -> f64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    }
}

#[test]
fn bron_kerbosch_oracle_sanity() {
    let k5: Vec<Vec<bool>> = (0..5).map(|i| (0..5).map(|j| i != j).collect()).collect();
    assert_eq!(clique_number(&k5), 5);
    let c5: Vec<Vec<bool>> = (0..5).map(|i| (0..5).map(|j| (i + 1) % 5 == j || (j + 1) % 5 == i).collect()).collect();
    assert_eq!(clique_number(&c5), 2);
}

#[test]
fn greedy_matches_replay() {
    for seed in 0..5 {
        let o = QueryOracle::new(5000, seed).unwrap();
        let r = greedy_clique(&o).unwrap();
        let mut t: Vec<u32> = (0..5000).collect();
        let mut k = Vec::new();
        while let Some(&first) = t.first() {
            k.push(first);
            t = t[1..].iter().copied().filter(|&x| o.answer(EdgeKey::ordered(first, x))).collect();
        }
        assert_eq!(r.clique, k);
    }
}

#[test]
fn one_round_matches_replay() {
    let n = 1u64 << 16;
    let mut sizes = Vec::new();
    for seed in 0..30 {
        let o = QueryOracle::new(n, seed).unwrap();
        let r = run_algorithm(Variant::OneRound, &o, 1.0).unwrap();
        // ⌊n^{1/2}⌋ = 256 vertices, C(256,2) ≤ n
        assert_eq!(r.sizes.s, Some(256));
        let s: Vec<u32> = (0..256).collect();
        assert_eq!(r.clique.len(), clique_number(&adj(&o, &s)), "seed {seed}");
        assert!(r.clique_verified() && r.budgets_respected());
        sizes.push(r.clique.len());
    }
    println!("one_round n=2^16 delta=1: median clique size {}", median(sizes));
}

#[test]
fn three_round_matches_replay() {
    let n = 1u64 << 16;
    let mut sizes = Vec::new();
    for seed in 0..30 {
        let o = QueryOracle::new(n, seed).unwrap();
        let r = run_algorithm(Variant::ThreeRound, &o, 1.0).unwrap();
        let s_len = r.sizes.s.unwrap() as u32;
        // ⌊n^{1/4}⌋ = 16
        assert_eq!(s_len, 16);
        let s: Vec<u32> = (0..s_len).collect();
        let s_prime: Vec<u32> = r.clique.iter().copied().filter(|&v| v < s_len).collect();
        assert_eq!(s_prime.len(), clique_number(&adj(&o, &s)));
        let t_len = (n / s_prime.len() as u64).min(n - s_len as u64) as u32;
        let t_prime: Vec<u32> = (s_len..s_len + t_len)
            .filter(|&t| s_prime.iter().all(|&x| o.answer(EdgeKey::ordered(x, t))))
            .collect();
        assert_eq!(r.sizes.t_prime_raw, Some(t_prime.len() as u64));
        let kept = r.sizes.t_prime.unwrap() as usize;
        let t2 = clique_number(&adj(&o, &t_prime[..kept]));
        assert_eq!(r.clique.len(), s_prime.len() + t2, "seed {seed}");
        assert!(r.clique_verified() && r.budgets_respected());
        sizes.push(r.clique.len());
    }
    println!("three_round n=2^16 delta=1: median clique size {}", median(sizes));
}

#[test]
fn two_small_first_round_at_large_n() {
    let n = 1u64 << 20;
    assert_eq!(two_round_first_sets(Variant::TwoSmall, n, 1.2).unwrap(), (16, n - 16));
    // |S'| is the clique number of the first 16 vertices
    let s: Vec<u32> = (0..16).collect();
    let sizes: Vec<usize> = (0..30).map(|seed| clique_number(&adj(&QueryOracle::new(n, seed).unwrap(), &s))).collect();
    println!("two_small n=2^20 delta=1.2: median |S'| {}", median(sizes));
}

#[test]
fn two_round_variants_match_replay() {
    let n = 1u64 << 12;
    for (v, delta) in [(Variant::TwoSmall, 1.2), (Variant::TwoSmall, 1.0), (Variant::TwoLarge, 1.3)] {
        for seed in 0..5 {
            let o = QueryOracle::new(n, seed).unwrap();
            let r = run_algorithm(v, &o, delta).unwrap();
            let (s_len, t_len) = two_round_first_sets(v, n, delta).unwrap();
            assert_eq!((r.sizes.s, r.sizes.t), (Some(s_len), Some(t_len)));
            let s: Vec<u32> = (0..s_len as u32).collect();
            let s_prime: Vec<u32> = r.clique.iter().copied().filter(|&x| (x as u64) < s_len).collect();
            assert_eq!(s_prime.len(), clique_number(&adj(&o, &s)));
            let t_prime: Vec<u32> = (s_len as u32..(s_len + t_len) as u32)
                .filter(|&t| s_prime.iter().all(|&x| o.answer(EdgeKey::ordered(x, t))))
                .collect();
            assert_eq!(r.sizes.t_prime_raw, Some(t_prime.len() as u64));
            let kept = r.sizes.t_prime.unwrap() as usize;
            assert_eq!(r.clique.len(), s_prime.len() + clique_number(&adj(&o, &t_prime[..kept])), "{v:?} seed {seed}");
            assert!(r.clique_verified() && r.budgets_respected());
        }
    }
}

#[test]
fn greedy_median_at_two_to_twenty() {
    let n = 1u64 << 20;
    let sizes: Vec<usize> = (0..30).map(|s| greedy_clique(&QueryOracle::new(n, s).unwrap()).unwrap().clique.len()).collect();
    let m = median(sizes);
    assert!((17.0..=23.0).contains(&m), "median {m}");
}

#[test]
fn greedy_halves_candidates() {
    let n = 1u64 << 16;
    assert_eq!(greedy_clique(&QueryOracle::new(n, 0).unwrap()).unwrap().greedy_trace[0], n);
    let mut ratios = Vec::new();
    for seed in 0..100 {
        let r = greedy_clique(&QueryOracle::new(n, seed).unwrap()).unwrap();
        for w in r.greedy_trace.windows(2) {
            if w[0] >= 2 {
                ratios.push(w[1] as f64 / (w[0] - 1) as f64);
            }
        }
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((0.47..=0.53).contains(&mean), "mean shrink ratio {mean}");
}

#[test]
fn fresh_answers_are_fair() {
    let big = 1u64 << 20;
    let n_edges = 100_000u64;
    let mut within = 0;
    for seed in 0..100 {
        let o = QueryOracle::new(big, seed).unwrap();
        let pos = (0..n_edges).filter(|&i| o.answer(EdgeKey::ordered(i as u32, (i + 1 + seed) as u32 + 7))).count() as f64;
        if (pos - n_edges as f64 / 2.0).abs() <= 4.0 * (n_edges as f64).sqrt() {
            within += 1;
        }
    }
    assert!(within >= 99, "{within} of 100 seeds within 4 sqrt(N)");
}
