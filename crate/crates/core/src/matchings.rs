//! Perfect matchings in 3- and 4-partite hypergraphs, padding, and the join
//! of two 3D matching instances.
//!
//! Ground sets are `Z_k = {1, …, k}` with arithmetic modulo `k` on those
//! representatives, so `k +_k 1 = 1`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::par;

/// Default bound on the ground-set size for matching counts.
pub const DEFAULT_MAX_GROUND: usize = 6;

/// Edges over `Z_size^D`, kept sorted and duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypergraph<const D: usize> {
    size: usize,
    edges: Vec<[usize; D]>,
}

pub type Hypergraph3 = Hypergraph<3>;
pub type Hypergraph4 = Hypergraph<4>;

/// `x +_u 1` on representatives `1..=u`.
pub fn succ_mod(x: usize, u: usize) -> usize {
    if x == u {
        1
    } else {
        x + 1
    }
}

impl<const D: usize> Hypergraph<D> {
    /// Builds a hypergraph over `Z_size`; duplicates are rejected.
    pub fn new(size: usize, edges: Vec<[usize; D]>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidValue("ground set size must be positive".into()));
        }
        for e in &edges {
            if e.iter().any(|&c| c == 0 || c > size) {
                return Err(Error::InvalidValue(format!("edge {e:?} leaves Z_{size}")));
            }
        }
        let mut sorted = edges;
        sorted.sort_unstable();
        let before = sorted.len();
        sorted.dedup();
        if sorted.len() != before {
            return Err(Error::InvalidValue("duplicate edge".into()));
        }
        Ok(Hypergraph { size, edges: sorted })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn edges(&self) -> &[[usize; D]] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: &[usize; D]) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// A copy without edge `e` (unchanged if absent).
    pub fn without(&self, e: &[usize; D]) -> Self {
        Hypergraph { size: self.size, edges: self.edges.iter().filter(|x| *x != e).copied().collect() }
    }

    /// Number of edges whose coordinate `coord` (0-based) equals `value`.
    pub fn mult(&self, value: usize, coord: usize) -> usize {
        self.edges.iter().filter(|e| e[coord] == value).count()
    }

    /// True when every value of `Z_size` occurs in every coordinate.
    pub fn covers(&self) -> bool {
        (0..D).all(|c| (1..=self.size).all(|v| self.edges.iter().any(|e| e[c] == v)))
    }

    /// Number of perfect matchings, with the default ground-set bound.
    pub fn count_matchings(&self) -> Result<BigUint> {
        self.count_matchings_bounded(DEFAULT_MAX_GROUND)
    }

    /// Number of perfect matchings: sets of `size` edges that are pairwise
    /// distinct in every coordinate.
    ///
    /// Exhaustive search that always branches on the uncovered vertex with
    /// the fewest available edges; the branches below the first vertex are
    /// explored in parallel.
    pub fn count_matchings_bounded(&self, max_ground: usize) -> Result<BigUint> {
        if self.size > max_ground {
            return Err(Error::BoundExceeded { what: "ground set", value: self.size, bound: max_ground });
        }
        let search = Search::new(self);
        let state = State::new(self.size, D);
        let Some((_, branch)) = search.pick(&state) else {
            return Ok(BigUint::one());
        };
        let counts = par::map_slice(&branch, |&e| {
            let mut st = state.clone();
            search.take(&mut st, e);
            search.count(&mut st)
        });
        Ok(counts.into_iter().sum())
    }

    /// Reference count: for each first-coordinate value in turn, choose one
    /// incident edge whose other coordinates are unused.
    pub fn count_by_first_coordinate(&self) -> BigUint {
        let mut total = BigUint::zero();
        self.for_each_matching(|_| {
            total += 1u32;
            true
        });
        total
    }

    /// Calls `f` on every perfect matching (edges ordered by first
    /// coordinate). Returning `false` stops the enumeration.
    pub fn for_each_matching(&self, mut f: impl FnMut(&[[usize; D]]) -> bool) {
        let mut by_first: Vec<Vec<[usize; D]>> = vec![Vec::new(); self.size + 1];
        for e in &self.edges {
            by_first[e[0]].push(*e);
        }
        let mut used = vec![vec![false; self.size + 1]; D];
        let mut chosen = Vec::with_capacity(self.size);

        #[allow(clippy::type_complexity)]
        fn go<const D: usize>(
            x: usize,
            k: usize,
            by_first: &[Vec<[usize; D]>],
            used: &mut [Vec<bool>],
            chosen: &mut Vec<[usize; D]>,
            f: &mut dyn FnMut(&[[usize; D]]) -> bool,
        ) -> bool {
            if x > k {
                return f(chosen);
            }
            for e in &by_first[x] {
                if (1..D).any(|c| used[c][e[c]]) {
                    continue;
                }
                (1..D).for_each(|c| used[c][e[c]] = true);
                chosen.push(*e);
                let go_on = go(x + 1, k, by_first, used, chosen, f);
                chosen.pop();
                (1..D).for_each(|c| used[c][e[c]] = false);
                if !go_on {
                    return false;
                }
            }
            true
        }
        go(1, self.size, &by_first, &mut used, &mut chosen, &mut f);
    }

    /// Text form: `<tag> <size>` followed by one edge per line.
    pub fn to_text(&self, tag: &str) -> String {
        let mut s = format!("{tag} {}\n", self.size);
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|c| c.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Parses the text form. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, tag: &str) -> Result<Self> {
        let mut size = None;
        let mut edges = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if size.is_none() {
                if toks.len() != 2 || toks[0] != tag {
                    return Err(Error::Parse { line, msg: format!("expected `{tag} <size>`") });
                }
                size = Some(parse_usize(toks[1], line)?);
                continue;
            }
            edges.push(parse_edge::<D>(&toks, line)?);
        }
        let size = size.ok_or(Error::Parse { line: 0, msg: format!("missing `{tag} <size>` header") })?;
        Hypergraph::new(size, edges)
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("not a nonnegative integer: {tok:?}") })
}

fn parse_edge<const D: usize>(toks: &[&str], line: usize) -> Result<[usize; D]> {
    if toks.len() != D {
        return Err(Error::Parse { line, msg: format!("expected {D} coordinates, got {}", toks.len()) });
    }
    let mut e = [0; D];
    for (slot, tok) in e.iter_mut().zip(toks) {
        *slot = parse_usize(tok, line)?;
    }
    Ok(e)
}

/// Search tables for the most-constrained-vertex counter.
struct Search<const D: usize> {
    edges: Vec<[usize; D]>,
    /// `incident[c][v]`: edge ids with coordinate `c` equal to `v`.
    incident: Vec<Vec<Vec<usize>>>,
    size: usize,
}

#[derive(Clone)]
struct State {
    used: Vec<Vec<bool>>,
    covered: usize,
}

impl State {
    fn new(size: usize, dims: usize) -> Self {
        State { used: vec![vec![false; size + 1]; dims], covered: 0 }
    }
}

impl<const D: usize> Search<D> {
    fn new(g: &Hypergraph<D>) -> Self {
        let mut incident = vec![vec![Vec::new(); g.size + 1]; D];
        for (id, e) in g.edges.iter().enumerate() {
            for c in 0..D {
                incident[c][e[c]].push(id);
            }
        }
        Search { edges: g.edges.clone(), incident, size: g.size }
    }

    fn available(&self, st: &State, id: usize) -> bool {
        let e = &self.edges[id];
        (0..D).all(|c| !st.used[c][e[c]])
    }

    /// The uncovered vertex with fewest available edges, and those edges.
    /// `None` when everything is covered.
    fn pick(&self, st: &State) -> Option<((usize, usize), Vec<usize>)> {
        if st.covered == self.size {
            return None;
        }
        let mut best: Option<((usize, usize), Vec<usize>)> = None;
        for c in 0..D {
            for v in 1..=self.size {
                if st.used[c][v] {
                    continue;
                }
                let avail: Vec<usize> =
                    self.incident[c][v].iter().copied().filter(|&id| self.available(st, id)).collect();
                let better = best.as_ref().is_none_or(|(_, b)| avail.len() < b.len());
                if better {
                    let done = avail.len() <= 1;
                    best = Some(((c, v), avail));
                    if done {
                        return best;
                    }
                }
            }
        }
        best
    }

    fn take(&self, st: &mut State, id: usize) {
        let e = self.edges[id];
        for c in 0..D {
            st.used[c][e[c]] = true;
        }
        st.covered += 1;
    }

    fn undo(&self, st: &mut State, id: usize) {
        let e = self.edges[id];
        for c in 0..D {
            st.used[c][e[c]] = false;
        }
        st.covered -= 1;
    }

    fn count(&self, st: &mut State) -> BigUint {
        let Some((_, branch)) = self.pick(st) else {
            return BigUint::one();
        };
        let mut total = BigUint::zero();
        for id in branch {
            self.take(st, id);
            total += self.count(st);
            self.undo(st, id);
        }
        total
    }
}

/// `#3DM(E)` with the default bound.
pub fn count_3dm(g: &Hypergraph3) -> Result<BigUint> {
    g.count_matchings()
}

/// `#4DM(E)` with the default bound.
pub fn count_4dm(g: &Hypergraph4) -> Result<BigUint> {
    g.count_matchings()
}

/// `E_u = E ∪ {(x, x, x) | k < x ≤ u}`.
pub fn pad(g: &Hypergraph3, u: usize) -> Result<Hypergraph3> {
    if u < g.size {
        return Err(Error::InvalidValue(format!("cannot pad Z_{} down to Z_{u}", g.size)));
    }
    let mut edges = g.edges.clone();
    edges.extend((g.size + 1..=u).map(|x| [x, x, x]));
    Hypergraph::new(u, edges)
}

/// The join of two 3D matching instances: a 4D instance `j` over `Z_u` with
/// `u = 1 + max(k, k')` and two special edges `h = (u,u,u,u)` and
/// `h' = (1,u,u,u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinResult {
    pub j: Hypergraph4,
    pub h: [usize; 4],
    pub h_prime: [usize; 4],
}

impl JoinResult {
    pub fn u(&self) -> usize {
        self.j.size()
    }

    /// `J \ {H'}`, whose matchings correspond to those of the first input.
    pub fn without_h_prime(&self) -> Hypergraph4 {
        self.j.without(&self.h_prime)
    }

    /// `J \ {H}`, whose matchings correspond to those of the second input.
    pub fn without_h(&self) -> Hypergraph4 {
        self.j.without(&self.h)
    }

    /// Text form: `u <u>`, `h …`, `hprime …`, then the edges.
    pub fn to_text(&self) -> String {
        let fmt = |e: &[usize; 4]| e.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
        let mut s = format!("u {}\nh {}\nhprime {}\n", self.u(), fmt(&self.h), fmt(&self.h_prime));
        for e in self.j.edges() {
            let _ = writeln!(s, "{}", fmt(e));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut h = None;
        let mut h_prime = None;
        // special lines are blanked so edge line numbers stay accurate
        let mut body = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            let toks: Vec<&str> = content.split_whitespace().collect();
            match toks.first() {
                Some(&"h") => h = Some(parse_edge::<4>(&toks[1..], line)?),
                Some(&"hprime") => h_prime = Some(parse_edge::<4>(&toks[1..], line)?),
                _ => body.push_str(raw),
            }
            body.push('\n');
        }
        let j = Hypergraph::parse(&body, "u")?;
        let h = h.ok_or(Error::Parse { line: 0, msg: "missing `h` line".into() })?;
        let h_prime = h_prime.ok_or(Error::Parse { line: 0, msg: "missing `hprime` line".into() })?;
        if !j.contains(&h) || !j.contains(&h_prime) {
            return Err(Error::InvalidValue("special edges must belong to J".into()));
        }
        Ok(JoinResult { j, h, h_prime })
    }
}

/// `join(E, E') = (J, H, H')` with
/// `J = {(x,x,y,z) | (x,y,z) ∈ E_u} ∪ {(x +_u 1, x, y, z) | (x,y,z) ∈ E'_u}`.
pub fn join(e: &Hypergraph3, e_prime: &Hypergraph3) -> JoinResult {
    let u = 1 + e.size().max(e_prime.size());
    let eu = pad(e, u).expect("u exceeds k");
    let epu = pad(e_prime, u).expect("u exceeds k'");
    let mut edges: Vec<[usize; 4]> = eu.edges().iter().map(|&[x, y, z]| [x, x, y, z]).collect();
    edges.extend(epu.edges().iter().map(|&[x, y, z]| [succ_mod(x, u), x, y, z]));
    let j = Hypergraph::new(u, edges).expect("the two halves differ in their first two coordinates");
    JoinResult { j, h: [u, u, u, u], h_prime: [1, u, u, u] }
}
