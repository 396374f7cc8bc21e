use super::oit::OneInThree;
use crate::matchings::Hypergraph3;

/// `k = 2`, `{(1,1,1), (1,2,2), (2,1,2), (2,2,1)}`: covering, no perfect
/// matching.
pub fn canonical_zero_instance() -> Hypergraph3 {
    Hypergraph3::new(2, vec![[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]]).expect("valid instance")
}

/// Allocates consecutive labels per coordinate.
#[derive(Default)]
struct Labels {
    next: [usize; 3],
}

impl Labels {
    fn take(&mut self, coord: usize) -> usize {
        self.next[coord] += 1;
        self.next[coord]
    }
}

/// Parsimonious reduction from one-in-three SAT to 3D matching.
///
/// A variable with `d` occurrences gets a ring of `d` X-elements `a`,
/// `d` Y-elements `b` and `2d` Z-tokens `p`, `q`, with triples
/// `(a_j, b_j, p_j)` (variable false) and `(a_{j+1}, b_j, q_j)` (variable
/// true). A ring is matched entirely one way, leaving the `q` tokens or the
/// `p` tokens free. Each occurrence thus exposes one free token, `T` when
/// its literal is true and `F` otherwise.
///
/// A triple `(o1, o2, o3)` gets a selector `(s, s', T_oi)` for each `i`,
/// which absorbs one true token, and two sinks `(h1, h1', F_o1 | F_o2)`,
/// `(h2, h2', F_o2 | F_o3)`, which absorb the two false tokens in exactly
/// one way. Variables in no triple get a one-token ring with a sink taking
/// either token.
pub fn one_in_three_to_3dm(f: &OneInThree) -> Hypergraph3 {
    let n = f.num_vars();
    if n == 0 {
        return Hypergraph3::new(1, vec![[1, 1, 1]]).expect("valid instance");
    }
    let mut occurrences: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + 1];
    for (c, t) in f.triples().iter().enumerate() {
        for (i, &l) in t.iter().enumerate() {
            occurrences[l.unsigned_abs() as usize].push((c, i));
        }
    }
    let mut labels = Labels::default();
    let mut edges = Vec::new();
    // Free tokens per occurrence: (true token, false token).
    let mut tokens = vec![[(0usize, 0usize); 3]; f.triples().len()];
    for v in 1..=n {
        let d = occurrences[v].len().max(1);
        let a: Vec<usize> = (0..d).map(|_| labels.take(0)).collect();
        let b: Vec<usize> = (0..d).map(|_| labels.take(1)).collect();
        let p: Vec<usize> = (0..d).map(|_| labels.take(2)).collect();
        let q: Vec<usize> = (0..d).map(|_| labels.take(2)).collect();
        for j in 0..d {
            edges.push([a[j], b[j], p[j]]);
            edges.push([a[(j + 1) % d], b[j], q[j]]);
        }
        if occurrences[v].is_empty() {
            let (g, g2) = (labels.take(0), labels.take(1));
            edges.push([g, g2, p[0]]);
            edges.push([g, g2, q[0]]);
            continue;
        }
        for (j, &(c, i)) in occurrences[v].iter().enumerate() {
            let positive = f.triples()[c][i] > 0;
            tokens[c][i] = if positive { (p[j], q[j]) } else { (q[j], p[j]) };
        }
    }
    for tok in &tokens {
        let (s, s2) = (labels.take(0), labels.take(1));
        for &(t, _) in tok {
            edges.push([s, s2, t]);
        }
        let (h, h2) = (labels.take(0), labels.take(1));
        edges.push([h, h2, tok[0].1]);
        edges.push([h, h2, tok[1].1]);
        let (h, h2) = (labels.take(0), labels.take(1));
        edges.push([h, h2, tok[1].1]);
        edges.push([h, h2, tok[2].1]);
    }
    let k = labels.next[0];
    debug_assert!(labels.next.iter().all(|&x| x == k));
    let g = Hypergraph3::new(k, edges).expect("labels lie in 1..=k and edges are distinct");
    if g.covers() {
        g
    } else {
        canonical_zero_instance()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::count_one_in_three_brute;
    use num_bigint::BigUint;

    fn check(f: &OneInThree) -> BigUint {
        let g = one_in_three_to_3dm(f);
        assert!(g.covers());
        let m = g.count_matchings_bounded(usize::MAX).unwrap();
        assert_eq!(m, count_one_in_three_brute(f).unwrap(), "{f:?}");
        m
    }

    #[test]
    fn examples() {
        assert_eq!(check(&OneInThree::new(3, vec![[1, 2, 3]]).unwrap()), BigUint::from(3u32));
        assert_eq!(check(&OneInThree::new(3, vec![[1, 2, 3], [-1, -2, -3]]).unwrap()), BigUint::from(0u32));
        assert_eq!(check(&OneInThree::new(3, vec![[1, 2, 3], [1, -2, 3]]).unwrap()), BigUint::from(0u32));
        assert_eq!(check(&OneInThree::new(4, vec![[1, 2, 3], [-1, 2, 4], [1, 3, -4]]).unwrap()), BigUint::from(1u32));
        assert_eq!(check(&OneInThree::new(0, vec![]).unwrap()), BigUint::from(1u32));
        assert_eq!(check(&OneInThree::new(2, vec![]).unwrap()), BigUint::from(4u32));
        assert_eq!(check(&OneInThree::new(4, vec![[1, 2, 3], [-1, 2, 4]]).unwrap()), BigUint::from(2u32));
    }

    #[test]
    fn canonical_zero() {
        let g = canonical_zero_instance();
        assert!(g.covers());
        assert_eq!(g.count_matchings().unwrap(), BigUint::from(0u32));
    }
}
