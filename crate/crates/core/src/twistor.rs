//! The twistor space of a pseudo-sphere, one fiber point at a time.
//!
//! Points are orthogonal complex structures `J` on `V = R·1 ⊕ R^{2p+1,2q}`
//! (index 0 is the extra direction `1`), lying over `x = J(1)`. Tangent
//! vectors at `J` are elements `A ∈ m_J`; the horizontal part is the lift of
//! `A1` and the vertical part `A′ = A − H_{A1}` is an endomorphism of
//! `{1, J1}^⊥` anticommuting with `J`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lie::{
    anticommutator_defect, fiber_metric, m_space_basis, random_so, trace_product, MSpace, OrthogonalComplexStructure,
};
use crate::linalg::{matrix_exp, DiagonalMetric, Endo, Vector};
use crate::rng::GaussianStream;

/// Tolerance used when validating tangent vectors.
const TANGENT_TOL: f64 = 1e-8;

/// A point of the twistor space: `J` on `R·1 ⊕ ambient`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistorPoint {
    j: OrthogonalComplexStructure,
}

impl TwistorPoint {
    pub fn new(j: OrthogonalComplexStructure) -> Result<Self> {
        let g = j.metric();
        if g.sign(0) <= 0.0 {
            return Err(Error::IncompatibleJ("the extra direction must be space-like".into()));
        }
        let pt = Self { j };
        let residual = (pt.j.matrix() * pt.base_point() + pt.one()).amax();
        if residual > 1e-8 {
            return Err(Error::IncompatibleJ(format!("J(x) ≠ −1 ({residual:e})")));
        }
        Ok(pt)
    }

    /// A random point over `S^{2n}_{2q}`, `n = p + q`.
    pub fn random(p: usize, q: usize, rng: &mut GaussianStream) -> Self {
        Self {
            j: OrthogonalComplexStructure::random(p + 1, q, rng),
        }
    }

    pub fn structure(&self) -> &OrthogonalComplexStructure {
        &self.j
    }

    pub fn matrix(&self) -> &Endo {
        self.j.matrix()
    }

    pub fn metric(&self) -> &DiagonalMetric {
        self.j.metric()
    }

    /// Complex dimension of the base sphere.
    pub fn n(&self) -> usize {
        self.j.n() - 1
    }

    pub fn one(&self) -> Vector {
        Vector::from_fn(self.metric().dim(), |i, _| f64::from(i == 0))
    }

    /// `x = J(1)` as a vector of `V`.
    pub fn base_point(&self) -> Vector {
        self.j.matrix().column(0).into_owned()
    }

    /// `x` with the extra coordinate dropped.
    pub fn base_point_ambient(&self) -> Vector {
        let m = self.metric().dim();
        self.j.matrix().column(0).rows(1, m - 1).into_owned()
    }

    /// Projection onto `{1, J1}^⊥`.
    pub fn q_projector(&self) -> Endo {
        let g = self.metric();
        let m = g.dim();
        let one = self.one();
        let x = self.base_point();
        Endo::identity(m, m) - &one * g.lower(&one).transpose() - &x * g.lower(&x).transpose()
    }

    /// Random `X ⊥ {1, x}`.
    pub fn random_horizontal_vector(&self, rng: &mut GaussianStream) -> Vector {
        self.q_projector() * rng.vector(self.metric().dim())
    }

    /// Basis of `m_J`, dimension `n² + n`.
    pub fn tangent_space(&self) -> Result<MSpace> {
        m_space_basis(&self.j)
    }

    /// Random vertical tangent: the vertical part of a random `A ∈ m_J`.
    pub fn random_vertical(&self, rng: &mut GaussianStream) -> Result<Endo> {
        let space = self.tangent_space()?;
        let a = space.random_element(rng);
        Ok(vertical_part(self, &a))
    }
}

/// A tangent vector `A ∈ m_J` with its horizontal/vertical split cached.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistorTangent {
    a: Endo,
    horizontal: Vector,
    vertical: Endo,
}

impl TwistorTangent {
    pub fn new(pt: &TwistorPoint, a: Endo) -> Result<Self> {
        let scale = a.amax().max(1.0);
        let skew = pt.metric().skew_defect(&a);
        let anti = anticommutator_defect(pt.matrix(), &a);
        if skew.max(anti) > TANGENT_TOL * scale {
            return Err(Error::NotTangent {
                residual: skew.max(anti),
            });
        }
        let horizontal = &a * pt.one();
        let vertical = &a - horizontal_matrix(pt, &horizontal);
        Ok(Self {
            a,
            horizontal,
            vertical,
        })
    }

    pub fn matrix(&self) -> &Endo {
        &self.a
    }

    /// `A1`.
    pub fn horizontal(&self) -> &Vector {
        &self.horizontal
    }

    /// `A′`.
    pub fn vertical(&self) -> &Endo {
        &self.vertical
    }
}

/// `J` on `R·1 ⊕ ambient` with `J(1) = x`, `J(x) = −1` and `J = j` on
/// `{1, x}^⊥`. `j` is an ambient endomorphism, read only on `x^⊥`.
pub fn extend_cs(x: &Vector, j: &Endo, ambient: &DiagonalMetric) -> Result<TwistorPoint> {
    let m = ambient.dim();
    if x.len() != m || j.nrows() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: x.len(),
        });
    }
    let on_sphere = (ambient.ip(x, x) - 1.0).abs();
    if on_sphere > 1e-9 {
        return Err(Error::NotOnSphere { residual: on_sphere });
    }
    let g = DiagonalMetric::from_counts(1, 0).direct_sum(ambient);
    let p = Endo::identity(m, m) - x * ambient.lower(x).transpose();
    let jt = &p * j * &p;
    let leak = (&jt - j * &p).amax();
    if leak > 1e-9 * j.amax().max(1.0) {
        return Err(Error::IncompatibleJ(format!(
            "j does not preserve the tangent space ({leak:e})"
        )));
    }
    let mut big = Endo::zeros(m + 1, m + 1);
    big.view_mut((1, 1), (m, m)).copy_from(&jt);
    let mut xx = Vector::zeros(m + 1);
    xx.rows_mut(1, m).copy_from(x);
    let one = Vector::from_fn(m + 1, |i, _| f64::from(i == 0));
    big += &xx * g.lower(&one).transpose() - &one * g.lower(&xx).transpose();
    let tol = 1e-8 * big.amax().max(1.0).powi(2);
    let ocs = OrthogonalComplexStructure::new(g, big, tol).map_err(|e| Error::IncompatibleJ(e.to_string()))?;
    TwistorPoint::new(ocs)
}

/// `(J(1), P J P)` with the extra coordinate dropped.
pub fn restrict(pt: &TwistorPoint) -> (Vector, Endo) {
    let m = pt.metric().dim() - 1;
    let x = pt.base_point_ambient();
    let g = DiagonalMetric::from_signs(&pt.metric().signs()[1..].iter().map(|&s| s as i8).collect::<Vec<_>>())
        .expect("signs are ±1");
    let p = Endo::identity(m, m) - &x * g.lower(&x).transpose();
    let j = &p * pt.matrix().view((1, 1), (m, m)) * &p;
    (x, j)
}

fn horizontal_matrix(pt: &TwistorPoint, x: &Vector) -> Endo {
    let g = pt.metric();
    let one = pt.one();
    let j1 = pt.base_point();
    let jx = pt.matrix() * x;
    g.wedge(x, &one) + g.wedge(&j1, &jx)
}

/// `H_X = X ∧ 1 + J1 ∧ JX`: `H_X(1) = X`, `H_X(J1) = −JX`,
/// `H_X(Y) = −⟨X,Y⟩1 + ⟨JX,Y⟩J1` on `{1, J1}^⊥`.
pub fn horizontal_lift(pt: &TwistorPoint, x: &Vector) -> Result<TwistorTangent> {
    let g = pt.metric();
    let residual = g.ip(x, &pt.one()).abs().max(g.ip(x, &pt.base_point()).abs());
    if residual > TANGENT_TOL * x.amax().max(1.0) {
        return Err(Error::NotTangent { residual });
    }
    TwistorTangent::new(pt, horizontal_matrix(pt, x))
}

/// `A′ = A − H_{A1}`.
pub fn vertical_part(pt: &TwistorPoint, a: &Endo) -> Endo {
    let x = a * pt.one();
    a - horizontal_matrix(pt, &x)
}

/// `Q A Q` with `Q` the projection onto `{1, J1}^⊥`; agrees with
/// [`vertical_part`] on `m_J`.
pub fn vertical_part_projected(pt: &TwistorPoint, a: &Endo) -> Endo {
    let q = pt.q_projector();
    &q * a * &q
}

/// `J^∇(A) = J ∘ A`.
pub fn twistor_acs(pt: &TwistorPoint, a: &Endo) -> Endo {
    pt.matrix() * a
}

/// `G^t(A,B) = 8n⟨A1,B1⟩ − t(2n−2)Tr(A′B′)`. For `n = 1` the fiber is a
/// point and the second term is absent.
pub fn g_t(pt: &TwistorPoint, a: &Endo, b: &Endo, t: f64) -> f64 {
    let n = pt.n();
    let g = pt.metric();
    let one = pt.one();
    let base = 8.0 * n as f64 * g.ip(&(a * &one), &(b * &one));
    if n == 1 {
        return base;
    }
    base + t * fiber_metric(n, &vertical_part(pt, a), &vertical_part(pt, b))
}

/// The Killing-type metric `−(2n)Tr(AB)` of `so(V)`, `dim V = 2n + 2`.
pub fn ambient_metric(pt: &TwistorPoint, a: &Endo, b: &Endo) -> f64 {
    fiber_metric(pt.n() + 1, a, b)
}

/// The nominal constant `t = n/(n−1)`.
pub fn nominal_t(n: usize) -> f64 {
    n as f64 / (n as f64 - 1.0)
}

/// Torsion of the twistor connection: horizontal vector
/// `−A′(B1) + B′(A1)` and vertical `½(C + JCJ)`, `C = A1 ∧ B1`.
pub fn torsion_d(pt: &TwistorPoint, a: &Endo, b: &Endo) -> (Vector, Endo) {
    let one = pt.one();
    let (x, y) = (a * &one, b * &one);
    let (av, bv) = (vertical_part(pt, a), vertical_part(pt, b));
    let horizontal = -(&av * &y) + &bv * &x;
    let c = pt.metric().wedge(&x, &y);
    let j = pt.matrix();
    let vertical = (&c + j * &c * j) * 0.5;
    (horizontal, vertical)
}

fn torsion_as_tangent(pt: &TwistorPoint, a: &Endo, b: &Endo) -> Endo {
    let (h, v) = torsion_d(pt, a, b);
    horizontal_matrix(pt, &h) + v
}

/// `Ω(U, V) = G^t(J^∇U, V)`.
pub fn omega(pt: &TwistorPoint, u: &Endo, v: &Endo, t: f64) -> f64 {
    g_t(pt, &twistor_acs(pt, u), v, t)
}

/// `dΩ(A,B,C) = Σ_cyc Ω(T^D(A,B), C)`.
pub fn d_omega_cyclic(pt: &TwistorPoint, a: &Endo, b: &Endo, c: &Endo, t: f64) -> f64 {
    let args = [a, b, c];
    (0..3)
        .map(|k| {
            let tor = torsion_as_tangent(pt, args[k], args[(k + 1) % 3]);
            omega(pt, &tor, args[(k + 2) % 3], t)
        })
        .sum()
}

/// `dΩ(X,Y,A) = −16n⟨JAX,Y⟩ − t(2n−2)Tr(J (R_{X,Y})′ A)` for horizontal
/// `X, Y` and vertical `A`, with `R_{X,Y} = X ∧ Y`.
pub fn d_omega_closed_form(pt: &TwistorPoint, x: &Vector, y: &Vector, a: &Endo, t: f64) -> f64 {
    let (first, second) = d_omega_closed_form_parts(pt, x, y, a);
    first + t * second
}

/// `dΩ` of the closed form splits as `first + t·second`.
pub fn d_omega_closed_form_parts(pt: &TwistorPoint, x: &Vector, y: &Vector, a: &Endo) -> (f64, f64) {
    let n = pt.n() as f64;
    let g = pt.metric();
    let j = pt.matrix();
    let first = -16.0 * n * g.ip(&(j * a * x), y);
    let c = g.wedge(x, y);
    let rv = (&c + j * &c * j) * 0.5;
    let second = -(2.0 * n - 2.0) * trace_product(&(j * rv), a);
    (first, second)
}

/// Outcome of fitting `t` so that `dΩ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TStar {
    pub t_star: f64,
    /// `max |dΩ|` over the samples at `t*`.
    pub residual_at_t_star: f64,
    /// At `t = n/(n−1)`.
    pub residual_at_nominal_t: f64,
    /// At `t = 4n/(n−1)`.
    pub residual_at_alt_t: f64,
    /// `max |dΩ|` at `t = 0`, the natural scale of the residuals.
    pub scale: f64,
}

/// Least-squares `t` with `d_omega_closed_form = 0` over `trials` random
/// `(J, X, Y, A′)`.
pub fn solve_t_star(p: usize, q: usize, rng: &mut GaussianStream, trials: usize) -> Result<TStar> {
    let n = p + q;
    if n < 2 {
        return Err(Error::DimensionTooSmall { dim: n, min: 2 });
    }
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let pt = TwistorPoint::random(p, q, rng);
        let x = pt.random_horizontal_vector(rng);
        let y = pt.random_horizontal_vector(rng);
        let a = pt.random_vertical(rng)?;
        samples.push(d_omega_closed_form_parts(&pt, &x, &y, &a));
    }
    let den: f64 = samples.iter().map(|(_, b)| b * b).sum();
    if den <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateSamples);
    }
    let t_star = -samples.iter().map(|(a, b)| a * b).sum::<f64>() / den;
    let residual = |t: f64| samples.iter().map(|(a, b)| (a + t * b).abs()).fold(0.0, f64::max);
    let scale = residual(0.0);
    let nf = n as f64;
    let out = TStar {
        t_star,
        residual_at_t_star: residual(t_star),
        residual_at_nominal_t: residual(nominal_t(n)),
        residual_at_alt_t: residual(4.0 * nf / (nf - 1.0)),
        scale,
    };
    if out.residual_at_t_star > 1e-8 * scale.max(1.0) {
        return Err(Error::InvalidConfig(format!(
            "dΩ is not affine-solvable: residual {:e} at t* = {t_star}",
            out.residual_at_t_star
        )));
    }
    Ok(out)
}

/// `ϖ(A, B) = ⟨J(A1), B1⟩`.
pub fn varpi(pt: &TwistorPoint, a: &Endo, b: &Endo) -> f64 {
    let one = pt.one();
    pt.metric().ip(&(pt.matrix() * a * &one), &(b * &one))
}

/// `dϖ(A,B,C) = Σ_cyc ϖ(T^D(A,B), C)`.
pub fn d_varpi(pt: &TwistorPoint, a: &Endo, b: &Endo, c: &Endo) -> f64 {
    let args = [a, b, c];
    (0..3)
        .map(|k| {
            let tor = torsion_as_tangent(pt, args[k], args[(k + 1) % 3]);
            varpi(pt, &tor, args[(k + 2) % 3])
        })
        .sum()
}

/// `φ(P⁺a, P⁺b, P⁺c)` with `P⁺A = ½(A − iJA)`, expanded into the eight
/// real evaluations weighted by `(−i)^{|s|}/8`.
pub fn type_30_part(
    pt: &TwistorPoint,
    phi: &dyn Fn(&Endo, &Endo, &Endo) -> f64,
    a: &Endo,
    b: &Endo,
    c: &Endo,
) -> Complex64 {
    let ja = twistor_acs(pt, a);
    let jb = twistor_acs(pt, b);
    let jc = twistor_acs(pt, c);
    let mut total = Complex64::new(0.0, 0.0);
    for s in 0..8u32 {
        let x = if s & 1 == 0 { a } else { &ja };
        let y = if s & 2 == 0 { b } else { &jb };
        let z = if s & 4 == 0 { c } else { &jc };
        let weight = Complex64::new(0.0, -1.0).powu(s.count_ones()) / 8.0;
        total += weight * phi(x, y, z);
    }
    total
}

/// Sizes of the `(3,0)+(0,3)` and `(2,1)+(1,2)` parts of `dϖ` over
/// `samples` random triples from `m_J`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeNorms {
    pub pure: f64,
    pub mixed: f64,
}

pub fn d_varpi_type(pt: &TwistorPoint, rng: &mut GaussianStream, samples: usize) -> Result<TypeNorms> {
    if pt.n() < 2 {
        return Err(Error::DimensionTooSmall { dim: pt.n(), min: 2 });
    }
    let space = pt.tangent_space()?;
    let phi = |a: &Endo, b: &Endo, c: &Endo| d_varpi(pt, a, b, c);
    let mut out = TypeNorms { pure: 0.0, mixed: 0.0 };
    for _ in 0..samples {
        let a = space.random_element(rng);
        let b = space.random_element(rng);
        let c = space.random_element(rng);
        let full = phi(&a, &b, &c);
        let pure = 2.0 * type_30_part(pt, &phi, &a, &b, &c).re;
        out.pure = out.pure.max(pure.abs());
        out.mixed = out.mixed.max((full - pure).abs());
    }
    Ok(out)
}

/// A random isometry of `V` fixing `1`.
pub fn random_sphere_isometry(g: &DiagonalMetric, rng: &mut GaussianStream, scale: f64) -> Endo {
    let mut x = random_so(g, rng, scale);
    let m = g.dim();
    for k in 0..m {
        x[(0, k)] = 0.0;
        x[(k, 0)] = 0.0;
    }
    matrix_exp(&x)
}

fn check_sphere_isometry(b: &Endo, g: &DiagonalMetric) -> Result<()> {
    if b.nrows() != g.dim() || b.ncols() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: b.nrows(),
        });
    }
    let scale = b.amax().max(1.0).powi(2);
    let orth = g.orthogonality_defect(b);
    let one = Vector::from_fn(g.dim(), |i, _| f64::from(i == 0));
    let fix = (b * &one - &one).amax();
    let residual = orth.max(fix);
    if residual > 1e-9 * scale {
        return Err(Error::NotIsometry { residual });
    }
    Ok(())
}

/// `b·J = bJb⁻¹`, lying over `b·x`.
pub fn sigma_action(b: &Endo, pt: &TwistorPoint) -> Result<TwistorPoint> {
    check_sphere_isometry(b, pt.metric())?;
    TwistorPoint::new(pt.structure().conjugate(b))
}

/// `dΣ(A) = bAb⁻¹`.
pub fn sigma_differential(b: &Endo, g: &DiagonalMetric, a: &Endo) -> Endo {
    b * a * g.adjoint(b)
}

/// `max ‖dΣ(J^∇A) − J^∇(dΣA)‖` over `samples` random `A ∈ m_J`.
pub fn sigma_cauchy_riemann_residual(
    b: &Endo,
    pt: &TwistorPoint,
    rng: &mut GaussianStream,
    samples: usize,
) -> Result<f64> {
    let image = sigma_action(b, pt)?;
    let space = pt.tangent_space()?;
    let g = pt.metric();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let a = space.random_element(rng);
        let lhs = sigma_differential(b, g, &twistor_acs(pt, &a));
        let rhs = twistor_acs(&image, &sigma_differential(b, g, &a));
        worst = worst.max((lhs - rhs).amax());
    }
    Ok(worst)
}
