//! Minimal complex linear algebra and Born-rule behaviors for the bundled
//! states: the two-qubit singlet, the three-qubit parity state, and the
//! spin-1 pair measured through squared-spin components.

use num_complex::Complex64;

use crate::decide::vcs::ValueConstraintSystem;
use crate::error::{Error, Result};
use crate::scenario::{Behavior, Party, Scenario, Setting};
use crate::value::{Value, ValueMode, DEFAULT_TOL};

type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> CMatrix {
        CMatrix { rows, cols, data: vec![C::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> CMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        CMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn approx_eq(&self, other: &CMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.approx_eq(&self.adjoint(), tol)
    }

    /// Hermitian and idempotent within tolerance.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.mul(self).approx_eq(self, tol)
    }

    pub fn trace(&self) -> C {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// One measurement: labelled outcomes with one projector each.
#[derive(Clone, Debug)]
pub struct MeasurementSetting {
    pub label: String,
    pub outcomes: Vec<String>,
    pub projectors: Vec<CMatrix>,
}

impl MeasurementSetting {
    /// Each projector must be a projector, the family mutually orthogonal and
    /// complete.
    pub fn validate(&self) -> Result<()> {
        if self.outcomes.len() != self.projectors.len() || self.projectors.is_empty() {
            return Err(Error::Validation(format!(
                "setting {} has mismatched outcome/projector counts",
                self.label
            )));
        }
        let dim = self.projectors[0].rows;
        for (i, p) in self.projectors.iter().enumerate() {
            if p.rows != dim || p.cols != dim {
                return Err(Error::Validation(format!(
                    "setting {}: projector {i} has wrong shape",
                    self.label
                )));
            }
            if !p.is_projector(DEFAULT_TOL) {
                return Err(Error::Validation(format!(
                    "setting {}: operator {i} is not a projector",
                    self.label
                )));
            }
        }
        for i in 0..self.projectors.len() {
            for j in (i + 1)..self.projectors.len() {
                let prod = self.projectors[i].mul(&self.projectors[j]);
                if !prod.approx_eq(&CMatrix::zeros(dim, dim), DEFAULT_TOL) {
                    return Err(Error::Validation(format!(
                        "setting {}: projectors {i} and {j} are not orthogonal",
                        self.label
                    )));
                }
            }
        }
        let sum = self
            .projectors
            .iter()
            .fold(CMatrix::zeros(dim, dim), |acc, p| acc.add(p));
        if !sum.approx_eq(&CMatrix::identity(dim), DEFAULT_TOL) {
            return Err(Error::Validation(format!(
                "setting {}: projectors do not sum to the identity",
                self.label
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].rows
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_rows(vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])
}

fn check_unit(n: &[f64; 3]) -> Result<()> {
    let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::Validation(format!("direction {n:?} is not a unit vector")));
    }
    Ok(())
}

/// n·σ for a unit direction.
pub fn spin_half_component(n: &[f64; 3]) -> Result<CMatrix> {
    check_unit(n)?;
    let m = pauli_x()
        .scale(c(n[0], 0.0))
        .add(&pauli_y().scale(c(n[1], 0.0)))
        .add(&pauli_z().scale(c(n[2], 0.0)));
    Ok(m)
}

/// ±1 spin measurement along a unit direction, projectors (I ± n·σ)/2.
pub fn spin_half_setting(label: impl Into<String>, n: &[f64; 3]) -> Result<MeasurementSetting> {
    let s = spin_half_component(n)?;
    let id = CMatrix::identity(2);
    let plus = id.add(&s).scale(c(0.5, 0.0));
    let minus = id.sub(&s).scale(c(0.5, 0.0));
    let setting = MeasurementSetting {
        label: label.into(),
        outcomes: vec!["+1".into(), "-1".into()],
        projectors: vec![plus, minus],
    };
    setting.validate()?;
    Ok(setting)
}

/// Spin-1 component operators in the m = +1, 0, −1 basis.
pub fn spin_one_operators() -> (CMatrix, CMatrix, CMatrix) {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let sx = CMatrix::from_rows(vec![
        vec![c(0.0, 0.0), c(r, 0.0), c(0.0, 0.0)],
        vec![c(r, 0.0), c(0.0, 0.0), c(r, 0.0)],
        vec![c(0.0, 0.0), c(r, 0.0), c(0.0, 0.0)],
    ]);
    let sy = CMatrix::from_rows(vec![
        vec![c(0.0, 0.0), c(0.0, -r), c(0.0, 0.0)],
        vec![c(0.0, r), c(0.0, 0.0), c(0.0, -r)],
        vec![c(0.0, 0.0), c(0.0, r), c(0.0, 0.0)],
    ]);
    let sz = CMatrix::from_rows(vec![
        vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
    ]);
    (sx, sy, sz)
}

/// Projectors onto the squared-spin eigenvalues along a unit direction:
/// (P for value 1, P for value 0) = (S_n², I − S_n²). No eigensolver needed:
/// S_n³ = S_n makes S_n² itself the value-1 projector.
pub fn squared_spin_projectors(n: &[f64; 3]) -> Result<(CMatrix, CMatrix)> {
    check_unit(n)?;
    let (sx, sy, sz) = spin_one_operators();
    let s = sx
        .scale(c(n[0], 0.0))
        .add(&sy.scale(c(n[1], 0.0)))
        .add(&sz.scale(c(n[2], 0.0)));
    let p1 = s.mul(&s);
    let p0 = CMatrix::identity(3).sub(&p1);
    Ok((p1, p0))
}

/// Joint measurement of squared spin along three mutually orthogonal
/// directions; outcomes are the value patterns "011", "101", "110" (position
/// of the single 0 among the three directions).
pub fn spin_one_triple_setting(
    label: impl Into<String>,
    triple: &[[f64; 3]; 3],
) -> Result<MeasurementSetting> {
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = triple[i][0] * triple[j][0]
                + triple[i][1] * triple[j][1]
                + triple[i][2] * triple[j][2];
            if d.abs() > DEFAULT_TOL {
                return Err(Error::Validation(format!(
                    "triple directions {i} and {j} are not orthogonal"
                )));
            }
        }
    }
    let mut projectors = Vec::with_capacity(3);
    let mut outcomes = Vec::with_capacity(3);
    for i in 0..3 {
        let (_, p0) = squared_spin_projectors(&triple[i])?;
        projectors.push(p0);
        let pattern: String = (0..3).map(|j| if j == i { '0' } else { '1' }).collect();
        outcomes.push(pattern);
    }
    let setting = MeasurementSetting { label: label.into(), outcomes, projectors };
    setting.validate()?;
    Ok(setting)
}

/// (|01⟩ − |10⟩)/√2.
pub fn singlet_state() -> Vec<C> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(0.0, 0.0), c(r, 0.0), c(-r, 0.0), c(0.0, 0.0)]
}

/// (|000⟩ − |111⟩)/√2.
pub fn ghz_state() -> Vec<C> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = vec![c(0.0, 0.0); 8];
    v[0] = c(r, 0.0);
    v[7] = c(-r, 0.0);
    v
}

/// (|+1,−1⟩ + |−1,+1⟩ − |0,0⟩)/√3, in the m = +1, 0, −1 basis for each side.
pub fn spin_one_pair_state() -> Vec<C> {
    let r = 1.0 / 3.0_f64.sqrt();
    let mut v = vec![c(0.0, 0.0); 9];
    v[0 * 3 + 2] = c(r, 0.0); // |+1, −1⟩
    v[2 * 3 + 0] = c(r, 0.0); // |−1, +1⟩
    v[1 * 3 + 1] = c(-r, 0.0); // |0, 0⟩
    v
}

/// Behavior p(outcomes|settings) = ⟨ψ| ⊗_i P_i |ψ⟩ for a multipartite state.
/// One list of settings per party; the product of party dimensions must match
/// the state.
pub fn born_behavior(party_settings: &[Vec<MeasurementSetting>], state: &[C]) -> Result<Behavior> {
    if party_settings.len() < 2 || party_settings.len() > 3 {
        return Err(Error::Unsupported("born_behavior supports 2 or 3 parties".into()));
    }
    let mut dim = 1usize;
    for (pi, settings) in party_settings.iter().enumerate() {
        if settings.is_empty() {
            return Err(Error::Validation(format!("party {pi} has no settings")));
        }
        let d = settings[0].dim();
        for s in settings {
            s.validate()?;
            if s.dim() != d {
                return Err(Error::Validation(format!(
                    "party {pi}: settings act on different dimensions"
                )));
            }
        }
        dim *= d;
    }
    if dim != state.len() {
        return Err(Error::Validation(format!(
            "state has dimension {}, settings imply {dim}",
            state.len()
        )));
    }
    let norm = inner(state, state).re;
    if (norm - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::Validation(format!("state norm² is {norm}, not 1")));
    }
    let party_labels = ["A", "B", "C"];
    let parties: Vec<Party> = party_settings
        .iter()
        .enumerate()
        .map(|(pi, settings)| Party {
            label: party_labels[pi].into(),
            settings: settings
                .iter()
                .map(|s| Setting { label: s.label.clone(), outcomes: s.outcomes.clone() })
                .collect(),
        })
        .collect();
    let scenario = Scenario::new(parties)?;
    let b = Behavior::from_fn(scenario, ValueMode::float_default(), |s, o| {
        let mut joint: Option<CMatrix> = None;
        for (pi, (&si, &oi)) in s.iter().zip(o.iter()).enumerate() {
            let p = &party_settings[pi][si].projectors[oi];
            joint = Some(match joint {
                Some(m) => m.kron(p),
                None => p.clone(),
            });
        }
        let m = joint.expect("at least two parties");
        let p = inner(state, &m.apply(state)).re;
        // Clamp the tiny negative dust from floating-point round-off.
        Value::Float(p.max(0.0))
    });
    Ok(b)
}

/// Unit direction in the x–z plane at angle θ from the z axis.
pub fn xz_direction(theta: f64) -> [f64; 3] {
    [theta.sin(), 0.0, theta.cos()]
}

/// Singlet statistics by the closed form ¼(1 − a·b·x̂·ŷ) over two direction
/// lists.
pub fn singlet_behavior(dirs_a: &[[f64; 3]], dirs_b: &[[f64; 3]]) -> Result<Behavior> {
    if dirs_a.is_empty() || dirs_b.is_empty() {
        return Err(Error::Validation("need at least one direction per side".into()));
    }
    for d in dirs_a.iter().chain(dirs_b) {
        check_unit(d)?;
    }
    let make = |prefix: &str, dirs: &[[f64; 3]]| -> Vec<Setting> {
        (0..dirs.len())
            .map(|i| Setting {
                label: format!("{prefix}_{i}"),
                outcomes: vec!["+1".into(), "-1".into()],
            })
            .collect()
    };
    let scenario = Scenario::new(vec![
        Party { label: "A".into(), settings: make("x", dirs_a) },
        Party { label: "B".into(), settings: make("y", dirs_b) },
    ])?;
    let dirs_a = dirs_a.to_vec();
    let dirs_b = dirs_b.to_vec();
    Ok(Behavior::from_fn(scenario, ValueMode::float_default(), move |s, o| {
        let x = &dirs_a[s[0]];
        let y = &dirs_b[s[1]];
        let dot = x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
        let a: f64 = if o[0] == 0 { 1.0 } else { -1.0 };
        let b: f64 = if o[1] == 0 { 1.0 } else { -1.0 };
        Value::Float(0.25 * (1.0 - a * b * dot))
    }))
}

/// The X/Y settings for the three-qubit parity argument.
pub fn ghz_settings() -> Result<Vec<Vec<MeasurementSetting>>> {
    let x = spin_half_setting("X", &[1.0, 0.0, 0.0])?;
    let y = spin_half_setting("Y", &[0.0, 1.0, 0.0])?;
    Ok(vec![
        vec![x.clone(), y.clone()],
        vec![x.clone(), y.clone()],
        vec![x, y],
    ])
}

/// Born statistics of the parity state under X/Y settings.
pub fn ghz_behavior() -> Result<Behavior> {
    born_behavior(&ghz_settings()?, &ghz_state())
}

/// Correlator ⟨O_1 ⊗ O_2 ⊗ O_3⟩ from the Born behavior at one joint setting.
fn ghz_correlator(b: &Behavior, s: &[usize]) -> Result<f64> {
    let mut e = 0.0;
    for o in b.scenario.joint_outcomes(&s.to_vec()) {
        let sign: f64 = o.iter().map(|&oi| if oi == 0 { 1.0 } else { -1.0 }).product();
        e += sign * b.get(&s.to_vec(), &o)?.to_f64();
    }
    Ok(e)
}

/// Constraint system for predetermined ±1 values of X_i, Y_i on the parity
/// state: one parity constraint per perfectly correlated context, with signs
/// read off the Born correlators (which must be ±1 within tolerance).
pub fn ghz_constraint_system() -> Result<ValueConstraintSystem> {
    let b = ghz_behavior()?;
    let mut sys = ValueConstraintSystem::default();
    let mut vars = Vec::new();
    for party in ["1", "2", "3"] {
        for obs in ["X", "Y"] {
            vars.push(sys.add_pm_variable(format!("{obs}_{party}")));
        }
    }
    // Contexts with definite parity: XXX, XYY, YXY, YYX.
    for s in [[0usize, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]] {
        let e = ghz_correlator(&b, &s)?;
        if (e.abs() - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Domain(format!(
                "context {s:?} has correlator {e}, not ±1"
            )));
        }
        let sign: i8 = if e > 0.0 { 1 } else { -1 };
        let members: Vec<usize> = s
            .iter()
            .enumerate()
            .map(|(party, &si)| vars[party * 2 + si])
            .collect();
        sys.add_parity_constraint(members, sign)?;
    }
    Ok(sys)
}

/// Born statistics of the spin-1 pair when both sides measure squared spin
/// along the same list of orthogonal triples.
pub fn spin_one_pair_behavior(triples: &[[[f64; 3]; 3]]) -> Result<Behavior> {
    if triples.is_empty() {
        return Err(Error::Validation("need at least one triple".into()));
    }
    let settings: Vec<MeasurementSetting> = triples
        .iter()
        .enumerate()
        .map(|(i, t)| spin_one_triple_setting(format!("t_{i}"), t))
        .collect::<Result<_>>()?;
    born_behavior(&[settings.clone(), settings], &spin_one_pair_state())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::vcs::{check_value_assignment, AssignmentResult};

    const FRAC_PI_4: f64 = std::f64::consts::FRAC_PI_4;
    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        // σ_x σ_y = i σ_z.
        assert!(x.mul(&y).approx_eq(&z.scale(c(0.0, 1.0)), 1e-12));
        assert!(x.mul(&x).approx_eq(&CMatrix::identity(2), 1e-12));
        assert!(y.is_hermitian(1e-12) && z.is_hermitian(1e-12));
    }

    #[test]
    fn spin_half_setting_is_a_valid_measurement() {
        let n = [0.6, 0.0, 0.8];
        let s = spin_half_setting("n", &n).unwrap();
        s.validate().unwrap();
        assert!((s.projectors[0].trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn born_singlet_matches_closed_form() {
        let dirs = [
            xz_direction(0.0),
            xz_direction(FRAC_PI_2),
            xz_direction(FRAC_PI_4),
        ];
        let settings: Vec<MeasurementSetting> = dirs
            .iter()
            .enumerate()
            .map(|(i, d)| spin_half_setting(format!("d_{i}"), d).unwrap())
            .collect();
        let born = born_behavior(&[settings.clone(), settings], &singlet_state()).unwrap();
        let closed = singlet_behavior(&dirs, &dirs).unwrap();
        for s in born.scenario.joint_settings() {
            for o in born.scenario.joint_outcomes(&s) {
                let p = born.get(&s, &o).unwrap().to_f64();
                let q = closed.get(&s, &o).unwrap().to_f64();
                assert!((p - q).abs() < 1e-12, "mismatch at {s:?} {o:?}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn singlet_correlator_is_minus_cosine() {
        let b = singlet_behavior(&[xz_direction(0.0)], &[xz_direction(FRAC_PI_4)]).unwrap();
        let e = b.correlator(0, 0).unwrap().to_f64();
        assert!((e + FRAC_PI_4.cos()).abs() < 1e-12);
    }

    #[test]
    fn singlet_chsh_magnitude_is_two_root_two() {
        let a = [xz_direction(0.0), xz_direction(FRAC_PI_2)];
        let bd = [xz_direction(FRAC_PI_4), xz_direction(3.0 * FRAC_PI_4)];
        let b = singlet_behavior(&a, &bd).unwrap();
        // With the fixed (+,+,+,−) layout, the quad ordering (x1,x0; y0,y1)
        // picks up all four ±cos(π/4) terms with a common sign: S = −2√2.
        let s = b.chsh_value((1, 0, 0, 1)).unwrap().to_f64();
        assert!((s.abs() - 2.0 * 2.0_f64.sqrt()).abs() < 1e-9, "got {s}");
        assert!(s < 0.0);
    }

    #[test]
    fn ghz_correlators_have_parity_signs() {
        let b = ghz_behavior().unwrap();
        assert!((ghz_correlator(&b, &[0, 0, 0]).unwrap() + 1.0).abs() < 1e-12);
        for s in [[0usize, 1, 1], [1, 0, 1], [1, 1, 0]] {
            assert!((ghz_correlator(&b, &s).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_constraints_are_unsatisfiable_with_parity_obstruction() {
        let sys = ghz_constraint_system().unwrap();
        assert_eq!(sys.total_assignments(), 64);
        match check_value_assignment(&sys).unwrap() {
            AssignmentResult::Unsat(cert) => {
                assert_eq!(cert.assignments_checked, 64);
                assert_eq!(cert.parity_obstruction, Some(vec![0, 1, 2, 3]));
            }
            _ => panic!("expected UNSAT"),
        }
    }

    #[test]
    fn squared_spin_projectors_have_expected_ranks() {
        let (p1, p0) = squared_spin_projectors(&[0.0, 0.0, 1.0]).unwrap();
        assert!((p1.trace().re - 2.0).abs() < 1e-12);
        assert!((p0.trace().re - 1.0).abs() < 1e-12);
        assert!(p1.is_projector(1e-12) && p0.is_projector(1e-12));
    }

    #[test]
    fn spin_one_triple_setting_is_complete() {
        let triple = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let s = spin_one_triple_setting("xyz", &triple).unwrap();
        assert_eq!(s.outcomes, vec!["011", "101", "110"]);
        s.validate().unwrap();
    }

    #[test]
    fn spin_one_pair_has_perfect_correlations_on_matching_triples() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let triples = [
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            [[r, r, 0.0], [r, -r, 0.0], [0.0, 0.0, 1.0]],
        ];
        let b = spin_one_pair_behavior(&triples).unwrap();
        assert!(b.validate().unwrap().is_valid());
        for t in 0..triples.len() {
            let s = vec![t, t];
            for o in b.scenario.joint_outcomes(&s) {
                let p = b.get(&s, &o).unwrap().to_f64();
                if o[0] == o[1] {
                    assert!((p - 1.0 / 3.0).abs() < 1e-9, "diag {o:?}: {p}");
                } else {
                    assert!(p.abs() < 1e-9, "offdiag {o:?}: {p}");
                }
            }
        }
        let pcs = b.find_perfect_correlations().unwrap();
        assert!(pcs.iter().any(|p| p.x == 0 && p.y == 0 && p.map == vec![0, 1, 2]));
    }

    #[test]
    fn born_behavior_rejects_dimension_mismatch() {
        let s = spin_half_setting("z", &[0.0, 0.0, 1.0]).unwrap();
        let err = born_behavior(&[vec![s.clone()], vec![s]], &spin_one_pair_state());
        assert!(err.is_err());
    }

    #[test]
    fn born_behaviors_are_no_signalling() {
        let b = ghz_behavior().unwrap();
        assert!(b.check_no_signalling().unwrap().passes());
    }
}
