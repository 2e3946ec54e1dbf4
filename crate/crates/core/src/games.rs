//! Alternating mirror descent on bilinear zero-sum games `min_a max_b aᵀAb`,
//! its dual form, and the regret and duality-gap bookkeeping around it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::family::{ScalarOracle, SmoothScalarFamily};
use crate::hamiltonian::SeparableHamiltonian;
use crate::integrators::symplectic_euler_step;
use crate::linalg::{norm_inf, sub, Matrix};
use crate::payoff::PayoffMatrix;
use crate::phase::PhasePoint;
use crate::regularizer::{Domain, Regularizer, RegularizerKind};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct GameInstance<T> {
    pub payoff: PayoffMatrix<T>,
    pub domain_a: Domain<T>,
    pub domain_b: Domain<T>,
    pub reg_a: Regularizer<T>,
    pub reg_b: Regularizer<T>,
}

impl<T: Real> GameInstance<T> {
    /// Strategy domains are taken from the regularizers.
    pub fn new(payoff: PayoffMatrix<T>, reg_a: Regularizer<T>, reg_b: Regularizer<T>) -> Self {
        Self { domain_a: reg_a.domain(), domain_b: reg_b.domain(), payoff, reg_a, reg_b }
    }

    pub fn with_domains(
        payoff: PayoffMatrix<T>,
        domain_a: Domain<T>,
        domain_b: Domain<T>,
        reg_a: Regularizer<T>,
        reg_b: Regularizer<T>,
    ) -> Result<Self> {
        if reg_a.domain() != domain_a || reg_b.domain() != domain_b {
            return Err(Error::InvalidArgument("regularizer domain differs from the declared strategy domain".into()));
        }
        Ok(Self { payoff, domain_a, domain_b, reg_a, reg_b })
    }

    /// Entropy-regularized game on two probability simplices.
    pub fn entropic(a: Matrix<T>) -> Result<Self> {
        Ok(Self::new(PayoffMatrix::new(a)?, Regularizer::negative_entropy(), Regularizer::negative_entropy()))
    }

    /// Unconstrained game with `α = β = ½‖·‖²`.
    pub fn euclidean(a: Matrix<T>) -> Result<Self> {
        let d = a.rows();
        Ok(Self::new(PayoffMatrix::new(a)?, Regularizer::euclidean(d), Regularizer::euclidean(d)))
    }

    pub fn a(&self) -> &Matrix<T> {
        self.payoff.a()
    }

    pub fn dim(&self) -> usize {
        self.payoff.dim()
    }

    /// `aᵀAb`.
    pub fn value(&self, s: &StrategyPair<T>) -> T {
        self.a().bilinear(&s.a, &s.b)
    }

    pub fn to_dual(&self, s: &StrategyPair<T>) -> Result<DualPoint<T>> {
        Ok(DualPoint { x: self.reg_a.gradient(&s.a)?, y: self.reg_b.gradient(&s.b)? })
    }

    pub fn to_primal(&self, z: &DualPoint<T>) -> StrategyPair<T> {
        StrategyPair { a: self.reg_a.conjugate_gradient(&z.x), b: self.reg_b.conjugate_gradient(&z.y) }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrategyPair<T> {
    pub a: Vec<T>,
    pub b: Vec<T>,
}

impl<T: Real> StrategyPair<T> {
    pub fn new(a: Vec<T>, b: Vec<T>) -> Self {
        Self { a, b }
    }

    pub fn uniform(d: usize) -> Self {
        let u = T::one() / T::lit(d as f64);
        Self { a: vec![u; d], b: vec![u; d] }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
}

fn check_dims<T: Real>(game: &GameInstance<T>, a: &[T], b: &[T]) -> Result<()> {
    let d = game.dim();
    for n in [a.len(), b.len()] {
        if n != d {
            return Err(Error::DimensionMismatch { expected: d, got: n });
        }
    }
    Ok(())
}

fn mapped_into<T: Real>(domain: &Domain<T>, w: &[T]) -> Result<()> {
    if w.iter().all(|x| x.is_finite()) && domain.contains(w) {
        Ok(())
    } else {
        Err(Error::DomainViolation(format!("mirror map left the strategy domain: {w:?}")))
    }
}

/// `x' = ∇α(a) − ηAb`, `a' = ∇α*(x')`, `y' = ∇β(b) + ηAᵀa'`, `b' = ∇β*(y')`.
pub fn amd_step<T: Real>(game: &GameInstance<T>, s: &StrategyPair<T>, eta: T) -> Result<StrategyPair<T>> {
    check_dims(game, &s.a, &s.b)?;
    let a_mat = game.a();
    let ab = a_mat.mul_vec(&s.b);
    let x: Vec<T> = game.reg_a.gradient(&s.a)?.iter().zip(&ab).map(|(&g, &v)| g - eta * v).collect();
    let a_next = game.reg_a.conjugate_gradient(&x);
    mapped_into(&game.domain_a, &a_next)?;
    let ata = a_mat.vec_mul(&a_next);
    let y: Vec<T> = game.reg_b.gradient(&s.b)?.iter().zip(&ata).map(|(&g, &v)| g + eta * v).collect();
    let b_next = game.reg_b.conjugate_gradient(&y);
    mapped_into(&game.domain_b, &b_next)?;
    Ok(StrategyPair { a: a_next, b: b_next })
}

/// `x' = x − ηA∇g(y)`, `y' = y + ηAᵀ∇f(x')` with `f = α*`, `g = β*`.
pub fn damd_step<T: Real>(
    f: &Regularizer<T>,
    g: &Regularizer<T>,
    a: &Matrix<T>,
    z: &DualPoint<T>,
    eta: T,
) -> Result<DualPoint<T>> {
    if z.x.len() != a.rows() || z.y.len() != a.cols() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: z.x.len() });
    }
    let gy = a.mul_vec(&g.conjugate_gradient(&z.y));
    let x: Vec<T> = z.x.iter().zip(&gy).map(|(&x, &v)| x - eta * v).collect();
    let fx = a.vec_mul(&f.conjugate_gradient(&x));
    let y: Vec<T> = z.y.iter().zip(&fx).map(|(&y, &v)| y + eta * v).collect();
    if x.iter().chain(&y).all(|v| v.is_finite()) {
        Ok(DualPoint { x, y })
    } else {
        Err(Error::OracleFailure("DAMD produced a non-finite dual point"))
    }
}

/// AMD iterates together with the dual points carried by DAMD.
///
/// For the entropic simplex the dual point is only determined up to a constant
/// shift by its primal image; the carried sequence fixes that shift, which the
/// modified-Hamiltonian terms of the regret identity depend on.
#[derive(Clone, Debug)]
pub struct AmdTrajectory<T> {
    pub eta: T,
    pub pairs: Vec<StrategyPair<T>>,
    pub duals: Vec<DualPoint<T>>,
}

impl<T> AmdTrajectory<T> {
    pub fn steps(&self) -> usize {
        self.pairs.len().saturating_sub(1)
    }
}

pub fn run_amd<T: Real>(game: &GameInstance<T>, start: &StrategyPair<T>, eta: T, steps: usize) -> Result<AmdTrajectory<T>> {
    if !(eta > T::zero()) {
        return Err(Error::InvalidArgument("η must be positive".into()));
    }
    check_dims(game, &start.a, &start.b)?;
    mapped_into(&game.domain_a, &start.a)?;
    mapped_into(&game.domain_b, &start.b)?;
    let mut z = game.to_dual(start)?;
    let mut pairs = Vec::with_capacity(steps + 1);
    let mut duals = Vec::with_capacity(steps + 1);
    pairs.push(start.clone());
    duals.push(z.clone());
    for index in 0..steps {
        z = damd_step(&game.reg_a, &game.reg_b, game.a(), &z, eta)
            .map_err(|e| Error::StepFailed { index, source: Box::new(e) })?;
        let s = game.to_primal(&z);
        mapped_into(&game.domain_a, &s.a)
            .and_then(|_| mapped_into(&game.domain_b, &s.b))
            .map_err(|e| Error::StepFailed { index, source: Box::new(e) })?;
        pairs.push(s);
        duals.push(z.clone());
    }
    Ok(AmdTrajectory { eta, pairs, duals })
}

/// Worst `‖∇α(a_{k+1}) − ∇α(a_k) + ηAb_k‖_∞` (and the `b` counterpart).
/// On the simplex the residual is measured modulo constant vectors.
pub fn conjugacy_residual<T: Real>(game: &GameInstance<T>, traj: &AmdTrajectory<T>) -> Result<T> {
    let project = |domain: &Domain<T>, r: Vec<T>| -> Vec<T> {
        if let Domain::Simplex = domain {
            let mean = r.iter().copied().sum::<T>() / T::lit(r.len() as f64);
            r.into_iter().map(|v| v - mean).collect()
        } else {
            r
        }
    };
    let mut worst = T::zero();
    for w in traj.pairs.windows(2) {
        let (s, t) = (&w[0], &w[1]);
        let ab = game.a().mul_vec(&s.b);
        let ra: Vec<T> = sub(&game.reg_a.gradient(&t.a)?, &game.reg_a.gradient(&s.a)?)
            .iter()
            .zip(&ab)
            .map(|(&d, &v)| d + traj.eta * v)
            .collect();
        let ata = game.a().vec_mul(&t.a);
        let rb: Vec<T> = sub(&game.reg_b.gradient(&t.b)?, &game.reg_b.gradient(&s.b)?)
            .iter()
            .zip(&ata)
            .map(|(&d, &v)| d - traj.eta * v)
            .collect();
        worst = worst.max(norm_inf(&project(&game.domain_a, ra))).max(norm_inf(&project(&game.domain_b, rb)));
    }
    Ok(worst)
}

/// `x ↦ φ*(Mx)` for a symmetric `M`, as a scalar oracle.
#[derive(Debug)]
struct Pullback<T> {
    reg: Regularizer<T>,
    m: Matrix<T>,
}

impl<T: Real> ScalarOracle<T> for Pullback<T> {
    fn value(&self, x: &[T]) -> T {
        self.reg.conjugate_value(&self.m.mul_vec(x))
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        self.m.vec_mul(&self.reg.conjugate_gradient(&self.m.mul_vec(x)))
    }

    fn hessian(&self, x: &[T]) -> Option<Matrix<T>> {
        let inner = match self.reg.kind() {
            RegularizerKind::HalfSquaredNorm { m_inv, .. } => m_inv.clone(),
            RegularizerKind::NegativeEntropy => {
                let s = self.reg.conjugate_gradient(&self.m.mul_vec(x));
                let n = s.len();
                Matrix::from_fn(n, n, |i, j| if i == j { s[i] - s[i] * s[j] } else { -s[i] * s[j] })
            }
            RegularizerKind::Custom(_) => return None,
        };
        Some(&(&self.m.transpose() * &inner) * &self.m)
    }
}

/// Separable Hamiltonian `F(p) = α*(Up)`, `G(q) = β*(Vq)` from `A = UV`.
pub fn pullback_hamiltonian<T: Real>(game: &GameInstance<T>) -> Result<SeparableHamiltonian<T>> {
    let (u, v) = game.payoff.factors()?;
    let d = game.dim();
    let f = Pullback { reg: game.reg_a.clone(), m: u.clone() };
    let g = Pullback { reg: game.reg_b.clone(), m: v.clone() };
    SeparableHamiltonian::new(
        SmoothScalarFamily::custom(Arc::new(f), 2),
        SmoothScalarFamily::custom(Arc::new(g), 2),
        d,
    )
}

/// Runs symplectic Euler on `F(p) = f(Up)`, `G(q) = g(Vq)` and DAMD from
/// `(Up₀, Vq₀)`; returns `max_k ‖(Up_k, Vq_k) − (x_k, y_k)‖_∞`.
pub fn pushforward_check<T: Real>(game: &GameInstance<T>, z0: &PhasePoint<T>, eta: T, steps: usize) -> Result<T> {
    let (u, v) = game.payoff.factors()?;
    let h = pullback_hamiltonian(game)?;
    let mut z = z0.clone();
    let mut dual = DualPoint { x: u.mul_vec(z0.p()), y: v.mul_vec(z0.q()) };
    let mut worst = T::zero();
    for _ in 0..steps {
        z = symplectic_euler_step(&h, &z, eta)?;
        dual = damd_step(&game.reg_a, &game.reg_b, game.a(), &dual, eta)?;
        let dx = norm_inf(&sub(&u.mul_vec(z.p()), &dual.x));
        let dy = norm_inf(&sub(&v.mul_vec(z.q()), &dual.y));
        worst = worst.max(dx).max(dy);
    }
    Ok(worst)
}

/// `max_{w ∈ domain} cᵀw`.
fn linear_max<T: Real>(domain: &Domain<T>, c: &[T]) -> Result<T> {
    match domain {
        Domain::Simplex => Ok(c.iter().copied().fold(T::neg_infinity(), T::max)),
        Domain::Box { lo, hi } => Ok(c.iter().zip(lo.iter().zip(hi)).map(|(&ci, (&l, &h))| (ci * l).max(ci * h)).sum()),
        Domain::Full => Err(Error::UnboundedDomain),
    }
}

fn linear_min<T: Real>(domain: &Domain<T>, c: &[T]) -> Result<T> {
    let neg: Vec<T> = c.iter().map(|&x| -x).collect();
    Ok(-linear_max(domain, &neg)?)
}

/// `max_{b̃} aᵀAb̃ − min_{ã} ãᵀAb`.
pub fn duality_gap<T: Real>(game: &GameInstance<T>, s: &StrategyPair<T>) -> Result<T> {
    check_dims(game, &s.a, &s.b)?;
    let best_b = linear_max(&game.domain_b, &game.a().vec_mul(&s.a))?;
    let best_a = linear_min(&game.domain_a, &game.a().mul_vec(&s.b))?;
    Ok(best_b - best_a)
}

fn mean<T: Real>(vs: &[Vec<T>]) -> Vec<T> {
    let n = T::lit(vs.len() as f64);
    let mut out = vec![T::zero(); vs[0].len()];
    for v in vs {
        for (o, &x) in out.iter_mut().zip(v) {
            *o = *o + x;
        }
    }
    out.into_iter().map(|x| x / n).collect()
}

fn check_prefix<T>(traj: &AmdTrajectory<T>, k: usize) -> Result<()> {
    if k == 0 || k > traj.pairs.len() {
        return Err(Error::InvalidArgument(format!("prefix {k} outside trajectory of {} points", traj.pairs.len())));
    }
    Ok(())
}

/// Duality gap at `((1/K)Σ_{k<K} a_k, (1/K)Σ_{k<K} b_k)`.
pub fn average_iterate_gap<T: Real>(game: &GameInstance<T>, traj: &AmdTrajectory<T>, k: usize) -> Result<T> {
    check_prefix(traj, k)?;
    let a: Vec<Vec<T>> = traj.pairs[..k].iter().map(|s| s.a.clone()).collect();
    let b: Vec<Vec<T>> = traj.pairs[..k].iter().map(|s| s.b.clone()).collect();
    duality_gap(game, &StrategyPair { a: mean(&a), b: mean(&b) })
}

/// Duality gap at the staggered averages `(mean(a_1..a_K), mean(b_0..b_{K−1}))`,
/// the pair for which the gap–regret identity is exact.
pub fn staggered_average_gap<T: Real>(game: &GameInstance<T>, traj: &AmdTrajectory<T>, k: usize) -> Result<T> {
    check_prefix(traj, k)?;
    if k > traj.steps() {
        return Err(Error::InvalidArgument(format!("prefix {k} exceeds {} steps", traj.steps())));
    }
    let a: Vec<Vec<T>> = traj.pairs[1..=k].iter().map(|s| s.a.clone()).collect();
    let b: Vec<Vec<T>> = traj.pairs[..k].iter().map(|s| s.b.clone()).collect();
    duality_gap(game, &StrategyPair { a: mean(&a), b: mean(&b) })
}

fn half_step_sums<T: Real>(game: &GameInstance<T>, traj: &AmdTrajectory<T>, k: usize) -> Result<(T, T, Vec<T>, Vec<T>)> {
    if k > traj.steps() {
        return Err(Error::InvalidArgument(format!("prefix {k} exceeds {} steps", traj.steps())));
    }
    let a_mat = game.a();
    let half = T::lit(0.5);
    let d = game.dim();
    let (mut own_a, mut own_b) = (T::zero(), T::zero());
    let mut sum_b = vec![T::zero(); d];
    let mut sum_a_next = vec![T::zero(); d];
    for w in traj.pairs[..=k].windows(2) {
        let (s, t) = (&w[0], &w[1]);
        let a_mid: Vec<T> = s.a.iter().zip(&t.a).map(|(&x, &y)| half * (x + y)).collect();
        let b_mid: Vec<T> = s.b.iter().zip(&t.b).map(|(&x, &y)| half * (x + y)).collect();
        own_a = own_a + a_mat.bilinear(&a_mid, &s.b);
        own_b = own_b + a_mat.bilinear(&t.a, &b_mid);
        for i in 0..d {
            sum_b[i] = sum_b[i] + s.b[i];
            sum_a_next[i] = sum_a_next[i] + t.a[i];
        }
    }
    Ok((own_a, own_b, sum_b, sum_a_next))
}

/// `R_{1,K}(ã) + R_{2,K}(b̃)` with the half-step convention:
/// `Σ ((a_k+a_{k+1})/2 − ã)ᵀAb_k + Σ a_{k+1}ᵀA(b̃ − (b_k+b_{k+1})/2)`.
pub fn cumulative_regret<T: Real>(
    game: &GameInstance<T>,
    traj: &AmdTrajectory<T>,
    k: usize,
    comparator: &StrategyPair<T>,
) -> Result<T> {
    check_dims(game, &comparator.a, &comparator.b)?;
    let (own_a, own_b, sum_b, sum_a_next) = half_step_sums(game, traj, k)?;
    let vs_a = game.a().bilinear(&comparator.a, &sum_b);
    let vs_b = game.a().bilinear(&sum_a_next, &comparator.b);
    Ok(own_a - vs_a + vs_b - own_b)
}

/// Best cumulative regret in hindsight, maximized over the strategy domains.
pub fn total_regret<T: Real>(game: &GameInstance<T>, traj: &AmdTrajectory<T>, k: usize) -> Result<T> {
    let (own_a, own_b, sum_b, sum_a_next) = half_step_sums(game, traj, k)?;
    let best_a = linear_min(&game.domain_a, &game.a().mul_vec(&sum_b))?;
    let best_b = linear_max(&game.domain_b, &game.a().vec_mul(&sum_a_next))?;
    Ok(own_a - best_a + best_b - own_b)
}

/// `f(x) + g(y) − (η/2)∇f(x)ᵀA∇g(y)`, the first-order modified Hamiltonian in
/// dual coordinates.
pub fn dual_mh1<T: Real>(game: &GameInstance<T>, z: &DualPoint<T>, eta: T) -> T {
    let fx = game.reg_a.conjugate_value(&z.x);
    let gy = game.reg_b.conjugate_value(&z.y);
    let cross = game.a().bilinear(&game.reg_a.conjugate_gradient(&z.x), &game.reg_b.conjugate_gradient(&z.y));
    fx + gy - eta * T::lit(0.5) * cross
}

/// `D_H(ζ, ζ̃)`: sum of the conjugate Bregman divergences of `f` and `g`.
pub fn dual_bregman<T: Real>(game: &GameInstance<T>, z: &DualPoint<T>, z_tilde: &DualPoint<T>) -> T {
    game.reg_a.conjugate_bregman(&z.x, &z_tilde.x) + game.reg_b.conjugate_bregman(&z.y, &z_tilde.y)
}

/// `(1/η)(D_H(ζ₀,ζ) − D_H(ζ_K,ζ) + H̃^(1)(ζ_K) − H̃^(1)(ζ₀))` with `ζ` the dual image of the comparator.
pub fn regret_energy_form<T: Real>(
    game: &GameInstance<T>,
    traj: &AmdTrajectory<T>,
    k: usize,
    comparator: &StrategyPair<T>,
) -> Result<T> {
    if k > traj.steps() {
        return Err(Error::InvalidArgument(format!("prefix {k} exceeds {} steps", traj.steps())));
    }
    let eta = traj.eta;
    let zc = game.to_dual(comparator)?;
    let (z0, zk) = (&traj.duals[0], &traj.duals[k]);
    let breg = dual_bregman(game, z0, &zc) - dual_bregman(game, zk, &zc);
    Ok((breg + dual_mh1(game, zk, eta) - dual_mh1(game, z0, eta)) / eta)
}

/// Relative mismatch between [`cumulative_regret`] and [`regret_energy_form`].
pub fn regret_identity_residual<T: Real>(
    game: &GameInstance<T>,
    traj: &AmdTrajectory<T>,
    k: usize,
    comparator: &StrategyPair<T>,
) -> Result<T> {
    let lhs = cumulative_regret(game, traj, k, comparator)?;
    let rhs = regret_energy_form(game, traj, k, comparator)?;
    let scale = lhs.abs().max(rhs.abs());
    Ok(if scale > T::zero() { (lhs - rhs).abs() / scale } else { T::zero() })
}

/// `|dḡ_K − (R_K/K − (a₀ᵀAb₀ − a_KᵀAb_K)/(2K))|` with the staggered-average gap.
pub fn verify_gap_regret_identity<T: Real>(game: &GameInstance<T>, traj: &AmdTrajectory<T>, k: usize) -> Result<T> {
    let gap = staggered_average_gap(game, traj, k)?;
    let kk = T::lit(k as f64);
    let boundary = game.value(&traj.pairs[0]) - game.value(&traj.pairs[k]);
    let rhs = total_regret(game, traj, k)? / kk - boundary / (T::lit(2.0) * kk);
    Ok((gap - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rps() -> Matrix<f64> {
        Matrix::from_f64_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])
    }

    #[test]
    fn agd_special_case() {
        let game = GameInstance::euclidean(Matrix::<f64>::identity(1)).unwrap();
        let s = StrategyPair::new(vec![0.3], vec![-0.2]);
        let t = amd_step(&game, &s, 0.1).unwrap();
        let a = 0.3 - 0.1 * -0.2;
        assert!((t.a[0] - a).abs() < 1e-15);
        assert!((t.b[0] - (-0.2 + 0.1 * a)).abs() < 1e-15);
        assert_eq!(amd_step(&game, &s, 0.0).unwrap(), s);
    }

    #[test]
    fn entropic_step_by_hand() {
        let game = GameInstance::entropic(rps()).unwrap();
        let s = StrategyPair::<f64>::uniform(2);
        let t = amd_step(&game, &s, 0.1).unwrap();
        // Ab = (0.5, −0.5) so a' ∝ (e^{−0.05}, e^{0.05})
        let z = (-0.05f64).exp() + 0.05f64.exp();
        assert!((t.a[0] - (-0.05f64).exp() / z).abs() < 1e-15);
        assert!((t.a.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gap_examples() {
        let game = GameInstance::entropic(rps()).unwrap();
        let g = duality_gap(&game, &StrategyPair::uniform(2)).unwrap();
        assert!((g - 1.0).abs() < 1e-15);
        let zero = GameInstance::entropic(Matrix::<f64>::zeros(2, 2)).unwrap();
        let s = StrategyPair::new(vec![0.2, 0.8], vec![0.6, 0.4]);
        assert_eq!(duality_gap(&zero, &s).unwrap(), 0.0);
        let free = GameInstance::euclidean(rps()).unwrap();
        assert!(matches!(duality_gap(&free, &s), Err(Error::UnboundedDomain)));
    }

    #[test]
    fn matching_pennies_nash() {
        let game = GameInstance::<f64>::entropic(Matrix::from_f64_rows(&[&[1.0, -1.0], &[-1.0, 1.0]])).unwrap();
        assert!(duality_gap(&game, &StrategyPair::uniform(2)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn amd_matches_carried_duals() {
        let game = GameInstance::entropic(Matrix::from_f64_rows(&[&[0.5, -1.0, 0.2], &[0.3, 0.1, -0.7], &[-0.4, 0.9, 0.0]]))
            .unwrap();
        let s0 = StrategyPair::new(vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]);
        let traj = run_amd(&game, &s0, 0.2, 50).unwrap();
        let mut s = s0;
        for k in 1..=50 {
            s = amd_step(&game, &s, 0.2).unwrap();
            assert!(norm_inf(&sub(&s.a, &traj.pairs[k].a)) < 1e-12);
            assert!(norm_inf(&sub(&s.b, &traj.pairs[k].b)) < 1e-12);
        }
        assert!(conjugacy_residual(&game, &traj).unwrap() < 1e-10);
    }

    #[test]
    fn identities_on_small_game() {
        let game = GameInstance::entropic(Matrix::from_f64_rows(&[&[0.5, -1.0, 0.2], &[0.3, 0.1, -0.7], &[-0.4, 0.9, 0.0]]))
            .unwrap();
        let s0 = StrategyPair::new(vec![0.2, 0.5, 0.3], vec![0.6, 0.1, 0.3]);
        let traj = run_amd(&game, &s0, 0.1, 200).unwrap();
        let cmp = StrategyPair::new(vec![0.1, 0.3, 0.6], vec![0.3, 0.3, 0.4]);
        for k in [0, 1, 17, 200] {
            assert!(regret_identity_residual(&game, &traj, k, &cmp).unwrap() < 1e-9, "K = {k}");
        }
        assert!(verify_gap_regret_identity(&game, &traj, 1).unwrap() < 1e-12);
        assert!(verify_gap_regret_identity(&game, &traj, 200).unwrap() < 1e-9);
        assert_eq!(cumulative_regret(&game, &traj, 0, &cmp).unwrap(), 0.0);
    }

    #[test]
    fn pushforward_quadratic() {
        for a in [
            Matrix::<f64>::identity(2),
            Matrix::diag(&[2.0, 3.0]),
            Matrix::from_f64_rows(&[&[1.0, 1.0], &[0.0, 2.0]]),
        ] {
            let game = GameInstance::euclidean(a).unwrap();
            let z0 = PhasePoint::new(vec![0.4, -0.3], vec![0.1, 0.7]).unwrap();
            assert!(pushforward_check(&game, &z0, 0.05, 100).unwrap() <= 1e-10);
            assert_eq!(pushforward_check(&game, &z0, 0.05, 0).unwrap(), 0.0);
        }
    }
}
