//! Individualization-refinement search for weighted-matrix isomorphisms.
//!
//! Colourings of both matrices are refined jointly: a vertex's new colour is
//! a canonical id for (old colour, diagonal entry, multiset of
//! (neighbour colour, entry)). Ids are assigned from the sorted union of
//! signatures, so the two sides stay comparable and the A-side partition
//! never depends on which B-side branch is being explored. This makes every
//! isomorphism correspond to exactly one leaf of the search tree.

use crate::matrix::IntMatrix;

/// Search-node budget exhausted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct CapHit;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Visit {
    Continue,
    Stop,
}

#[inline]
fn mix(colour: u32, value: i64) -> u64 {
    let mut z = (colour as u64)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(value as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

type Signature = (u32, i64, u64);

fn signatures(m: &IntMatrix, colour: &[u32]) -> Vec<Signature> {
    let n = m.dim();
    (0..n)
        .map(|v| {
            let row = m.row(v);
            let mut h = 0u64;
            for w in 0..n {
                if w != v {
                    h = h.wrapping_add(mix(colour[w], row[w]));
                }
            }
            (colour[v], row[v], h)
        })
        .collect()
}

fn class_count(colour: &[u32]) -> usize {
    colour.iter().map(|&c| c as usize + 1).max().unwrap_or(0)
}

/// Refines `ca` and `cb` to the coarsest stable joint colouring. Returns
/// `false` as soon as the colour-class sizes of the two sides disagree.
pub(crate) fn refine_pair(a: &IntMatrix, ca: &mut [u32], b: &IntMatrix, cb: &mut [u32]) -> bool {
    let mut classes = usize::MAX;
    loop {
        let sa = signatures(a, ca);
        let sb = signatures(b, cb);
        let mut all: Vec<Signature> = sa.iter().chain(sb.iter()).copied().collect();
        all.sort_unstable();
        all.dedup();
        let id = |s: &Signature| all.binary_search(s).unwrap() as u32;
        let mut count = vec![0i64; all.len()];
        for (v, s) in sa.iter().enumerate() {
            ca[v] = id(s);
            count[ca[v] as usize] += 1;
        }
        for (v, s) in sb.iter().enumerate() {
            cb[v] = id(s);
            count[cb[v] as usize] -= 1;
        }
        if count.iter().any(|&c| c != 0) {
            return false;
        }
        if all.len() == classes {
            return true;
        }
        classes = all.len();
    }
}

/// Backtracking search for bijections `phi` with
/// `b[phi[i]][phi[j]] == a[i][j]` for all `i, j`.
pub(crate) struct IsoSearch<'a> {
    a: &'a IntMatrix,
    b: &'a IntMatrix,
    pub nodes: u64,
    node_cap: u64,
}

impl<'a> IsoSearch<'a> {
    pub fn new(a: &'a IntMatrix, b: &'a IntMatrix, node_cap: u64) -> Self {
        Self {
            a,
            b,
            nodes: 0,
            node_cap,
        }
    }

    /// Runs the search from uniform colourings, with the optional forced
    /// pairs individualized first. `visit` receives each isomorphism found.
    pub fn run(
        &mut self,
        forced: &[(usize, usize)],
        visit: &mut dyn FnMut(&[usize]) -> Visit,
    ) -> Result<Visit, CapHit> {
        let n = self.a.dim();
        if n != self.b.dim() {
            return Ok(Visit::Continue);
        }
        if n == 0 {
            return Ok(visit(&[]));
        }
        let mut ca = vec![0u32; n];
        let mut cb = vec![0u32; n];
        for (k, &(v, w)) in forced.iter().enumerate() {
            ca[v] = 1 + k as u32;
            cb[w] = 1 + k as u32;
        }
        self.recurse(ca, cb, visit)
    }

    fn recurse(
        &mut self,
        mut ca: Vec<u32>,
        mut cb: Vec<u32>,
        visit: &mut dyn FnMut(&[usize]) -> Visit,
    ) -> Result<Visit, CapHit> {
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(CapHit);
        }
        if !refine_pair(self.a, &mut ca, self.b, &mut cb) {
            return Ok(Visit::Continue);
        }
        let k = class_count(&ca);
        let mut size = vec![0usize; k];
        for &c in &ca {
            size[c as usize] += 1;
        }
        let target = (0..ca.len()).find(|&v| size[ca[v] as usize] > 1);
        match target {
            None => {
                let mut owner = vec![0usize; k];
                for (w, &c) in cb.iter().enumerate() {
                    owner[c as usize] = w;
                }
                let phi: Vec<usize> = ca.iter().map(|&c| owner[c as usize]).collect();
                if self.verify(&phi) {
                    Ok(visit(&phi))
                } else {
                    Ok(Visit::Continue)
                }
            }
            Some(v) => {
                let cell = ca[v];
                let fresh = k as u32;
                for w in 0..cb.len() {
                    if cb[w] != cell {
                        continue;
                    }
                    let mut ca2 = ca.clone();
                    let mut cb2 = cb.clone();
                    ca2[v] = fresh;
                    cb2[w] = fresh;
                    if self.recurse(ca2, cb2, visit)? == Visit::Stop {
                        return Ok(Visit::Stop);
                    }
                }
                Ok(Visit::Continue)
            }
        }
    }

    fn verify(&self, phi: &[usize]) -> bool {
        let n = phi.len();
        (0..n).all(|i| {
            let ra = self.a.row(i);
            let rb = self.b.row(phi[i]);
            (0..n).all(|j| ra[j] == rb[phi[j]])
        })
    }
}

/// First isomorphism found from `a` to `b`, `Ok(None)` if there is none.
pub(crate) fn find_isomorphism(
    a: &IntMatrix,
    b: &IntMatrix,
    forced: &[(usize, usize)],
    node_cap: u64,
) -> Result<Option<Vec<usize>>, CapHit> {
    let mut found = None;
    let mut search = IsoSearch::new(a, b, node_cap);
    search.run(forced, &mut |phi| {
        found = Some(phi.to_vec());
        Visit::Stop
    })?;
    Ok(found)
}
