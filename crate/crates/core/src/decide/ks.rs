//! Kochen–Specker 101-colorability of direction sets: orthogonality is
//! detected numerically once, frozen into a combinatorial graph, and the
//! coloring search is purely combinatorial after that.

use crate::error::{Error, Result};

/// Tolerance for orthogonality and unit-vector detection.
pub const KS_ORTH_TOL: f64 = 1e-9;

/// The frozen combinatorial structure of a direction set.
#[derive(Clone, Debug, Default)]
pub struct OrthogonalityStructure {
    pub num_directions: usize,
    /// Orthogonal pairs (i < j).
    pub pairs: Vec<(usize, usize)>,
    /// Mutually orthogonal triples (i < j < k).
    pub triples: Vec<[usize; 3]>,
}

/// Certificate that the backtracking search exhausted every branch.
#[derive(Clone, Debug)]
pub struct KsCertificate {
    pub branches_explored: u64,
    pub structure: OrthogonalityStructure,
}

#[derive(Clone, Debug)]
pub enum KsResult {
    /// 0/1 per direction: 1 exactly where the squared-spin value 0 is assigned
    /// ... stored as `true` = colored 0.
    Colorable(Vec<bool>),
    Uncolorable(KsCertificate),
}

fn normalize(v: &[f64; 3]) -> Result<[f64; 3]> {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if n < KS_ORTH_TOL {
        return Err(Error::Validation("zero direction vector".into()));
    }
    Ok([v[0] / n, v[1] / n, v[2] / n])
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Build the orthogonality graph of a direction set. Directions must be
/// pairwise distinct up to sign.
pub fn orthogonality_structure(directions: &[[f64; 3]]) -> Result<OrthogonalityStructure> {
    let unit: Vec<[f64; 3]> = directions.iter().map(normalize).collect::<Result<_>>()?;
    let n = unit.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (dot(&unit[i], &unit[j]).abs() - 1.0).abs() < KS_ORTH_TOL {
                return Err(Error::Validation(format!(
                    "directions {i} and {j} are parallel up to sign"
                )));
            }
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if dot(&unit[i], &unit[j]).abs() < KS_ORTH_TOL {
                pairs.push((i, j));
            }
        }
    }
    let orth = |i: usize, j: usize| pairs.binary_search(&(i.min(j), i.max(j))).is_ok();
    let mut triples = Vec::new();
    for &(i, j) in &pairs {
        for k in (j + 1)..n {
            if orth(i, k) && orth(j, k) {
                triples.push([i, j, k]);
            }
        }
    }
    Ok(OrthogonalityStructure { num_directions: n, pairs, triples })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Color {
    Unset,
    Zero,
    One,
}

struct Search<'a> {
    s: &'a OrthogonalityStructure,
    colors: Vec<Color>,
    branches: u64,
}

impl Search<'_> {
    /// Propagate pair/triple constraints; false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut changed = false;
            for &(i, j) in &self.s.pairs {
                match (self.colors[i], self.colors[j]) {
                    (Color::Zero, Color::Zero) => return false,
                    (Color::Zero, Color::Unset) => {
                        self.colors[j] = Color::One;
                        changed = true;
                    }
                    (Color::Unset, Color::Zero) => {
                        self.colors[i] = Color::One;
                        changed = true;
                    }
                    _ => {}
                }
            }
            for t in &self.s.triples {
                let zeros = t.iter().filter(|&&v| self.colors[v] == Color::Zero).count();
                let ones = t.iter().filter(|&&v| self.colors[v] == Color::One).count();
                if zeros > 1 || ones == 3 {
                    return false;
                }
                if zeros == 1 {
                    for &v in t {
                        if self.colors[v] == Color::Unset {
                            self.colors[v] = Color::One;
                            changed = true;
                        }
                    }
                } else if ones == 2 && zeros == 0 {
                    for &v in t {
                        if self.colors[v] == Color::Unset {
                            self.colors[v] = Color::Zero;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn solve(&mut self) -> bool {
        if !self.propagate() {
            return false;
        }
        let next = match self.colors.iter().position(|&c| c == Color::Unset) {
            Some(v) => v,
            None => return self.verify(),
        };
        for color in [Color::Zero, Color::One] {
            self.branches += 1;
            let saved = self.colors.clone();
            self.colors[next] = color;
            if self.solve() {
                return true;
            }
            self.colors = saved;
        }
        false
    }

    fn verify(&self) -> bool {
        for &(i, j) in &self.s.pairs {
            if self.colors[i] == Color::Zero && self.colors[j] == Color::Zero {
                return false;
            }
        }
        for t in &self.s.triples {
            let zeros = t.iter().filter(|&&v| self.colors[v] == Color::Zero).count();
            if zeros != 1 {
                return false;
            }
        }
        true
    }
}

/// Assign 0/1 to each direction so that every mutually orthogonal triple has
/// exactly one 0 and no orthogonal pair has two 0s, or certify that no such
/// assignment exists by exhausting the backtracking tree.
pub fn ks_colorable(directions: &[[f64; 3]]) -> Result<KsResult> {
    let structure = orthogonality_structure(directions)?;
    let mut search = Search {
        s: &structure,
        colors: vec![Color::Unset; structure.num_directions],
        branches: 0,
    };
    if search.solve() {
        let coloring: Vec<bool> = search.colors.iter().map(|&c| c == Color::Zero).collect();
        Ok(KsResult::Colorable(coloring))
    } else {
        Ok(KsResult::Uncolorable(KsCertificate {
            branches_explored: search.branches,
            structure,
        }))
    }
}

/// The bundled 33-direction set (components in {0, ±1, ±√2}) that admits no
/// 101 coloring; loaded from the data file shipped with the crate.
pub fn bundled_uncolorable_directions() -> Vec<[f64; 3]> {
    let raw = include_str!("../../data/peres33.json");
    let vecs: Vec<[f64; 3]> = serde_json::from_str(raw).expect("bundled direction set parses");
    vecs
}
