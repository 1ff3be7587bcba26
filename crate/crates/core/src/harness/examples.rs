//! Built-in benchmark problems with closed-form solutions and reference
//! errors.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{ConstantField, ExprField, Field, FieldRef, Jet};
use crate::functionals::BoundaryFunctional;
use crate::numerics::{lu_solve, Elementary, Matrix, Precision, Real};
use crate::problem::{AxisConditions, BoxDomain, Coefficient, OperatorSpec, OperatorTerm, ProblemSpec};
use crate::pseudospectral::GridScheme;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExampleId {
    Ex1,
    Ex2,
    Ex3,
    Ex4,
    Ex5,
    Ex6,
    Ex7,
}

impl ExampleId {
    pub const ALL: [ExampleId; 7] = [
        ExampleId::Ex1,
        ExampleId::Ex2,
        ExampleId::Ex3,
        ExampleId::Ex4,
        ExampleId::Ex5,
        ExampleId::Ex6,
        ExampleId::Ex7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::Ex3 => "ex3",
            ExampleId::Ex4 => "ex4",
            ExampleId::Ex5 => "ex5",
            ExampleId::Ex6 => "ex6",
            ExampleId::Ex7 => "ex7",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ExampleId::Ex1 => 1,
            ExampleId::Ex7 => 3,
            _ => 2,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExampleId::Ex1 => "eps u'' + u'/(1+x) = x + 1 on [0,1], Robin at both ends",
            ExampleId::Ex2 => "-Δu = f on [0,1]², Dirichlet/Neumann/Robin",
            ExampleId::Ex3 => "Δu = y(1-y)sin³x on [0,π]×[0,1], homogeneous Dirichlet",
            ExampleId::Ex4 => "Δu = 2e^(x-y) on [0,1]², nonhomogeneous Dirichlet",
            ExampleId::Ex5 => "Δu = sin x - sin³x on [0,π/2]×[0,2], Dirichlet/Neumann",
            ExampleId::Ex6 => "Δu = f on [0,1]×[0,2], multi-point condition at y = 0",
            ExampleId::Ex7 => "Δu = 6/(4+x+y+z)³ on [-1/2,1/2]³, Dirichlet",
        }
    }

    /// Whether reported errors are relative (max error / max |u|).
    pub fn metric(self) -> Metric {
        match self {
            ExampleId::Ex3 | ExampleId::Ex5 => Metric::Relative,
            _ => Metric::MaxAbs,
        }
    }

    /// Shape parameter used for the reference tables, per method.
    pub fn default_shape(self, method: Method) -> f64 {
        match (self, method) {
            (ExampleId::Ex1, _) => 0.18,
            (ExampleId::Ex2, _) => 1.0,
            (ExampleId::Ex3, Method::Kansa) => 0.3041,
            (ExampleId::Ex5, Method::Kansa) => 0.5641,
            _ => 0.01,
        }
    }

    /// Node placement for the constrained method. Boundary nodes are only
    /// usable when no condition is a point evaluation; ex1 (Robin at both
    /// ends) keeps them, like the collocation grid it is compared with.
    pub fn default_scheme(self) -> GridScheme {
        match self {
            ExampleId::Ex1 => GridScheme::UniformClosed,
            _ => GridScheme::UniformInterior,
        }
    }

    pub fn default_grid(self) -> Vec<usize> {
        match self {
            ExampleId::Ex1 => vec![32],
            ExampleId::Ex2 => vec![7, 7],
            ExampleId::Ex3 => vec![10, 6],
            ExampleId::Ex4 | ExampleId::Ex5 => vec![10, 10],
            ExampleId::Ex6 => vec![10, 20],
            ExampleId::Ex7 => vec![5, 5, 5],
        }
    }

    pub fn references(self) -> Vec<Reference> {
        reference_table(self)
    }

    /// Builds the problem at the working precision of `eps` (`eps` only
    /// matters for ex1).
    pub fn problem<T: Real>(self, eps: &T) -> Result<ProblemSpec<T>> {
        let prec = eps.precision();
        match self {
            ExampleId::Ex1 => ex1(eps.clone()),
            ExampleId::Ex2 => ex2(prec),
            ExampleId::Ex3 => ex3(prec),
            ExampleId::Ex4 => ex4(prec),
            ExampleId::Ex5 => ex5(prec),
            ExampleId::Ex6 => ex6(prec),
            ExampleId::Ex7 => ex7(prec),
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExampleId::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidProblem(format!("unknown example `{s}` (expected ex1..ex7)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Constrained,
    Kansa,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Constrained => "constrained",
            Method::Kansa => "kansa",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "constrained" | "ps" => Ok(Method::Constrained),
            "kansa" | "collocation" => Ok(Method::Kansa),
            _ => Err(Error::InvalidProblem(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    MaxAbs,
    Relative,
}

/// Who produced a reference value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Method(Method),
    /// Best result from earlier literature on the same problem.
    Prior,
}

/// A reference error value for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub grid: Vec<usize>,
    pub eps: Option<f64>,
    pub source: Source,
    pub shape: Option<f64>,
    pub value: f64,
}

fn reference_table(id: ExampleId) -> Vec<Reference> {
    use Method::{Constrained as C, Kansa as K};
    let row = |grid: &[usize], eps: Option<f64>, source: Source, shape: Option<f64>, value: f64| Reference {
        grid: grid.to_vec(),
        eps,
        source,
        shape,
        value,
    };
    let mut out = Vec::new();
    match id {
        ExampleId::Ex1 => {
            let data: [(usize, i32, f64, f64, f64); 8] = [
                (32, -1, 7.93e-2, 2.151530648e-17, 1.677759019e-18),
                (64, -1, 4.02e-2, 2.896067662e-36, 2.217079325e-37),
                (128, -1, 2.02e-2, 2.141728769e-74, 1.623426611e-75),
                (32, -5, 6.62e-1, 2.909789773e-4, 1.580306190e-6),
                (64, -5, 4.04e-1, 2.179862305e-16, 1.182127709e-18),
                (128, -5, 2.38e-1, 8.050946529e-47, 3.898941782e-49),
                (128, -10, 2.68e-1, 6.224300576, 3.310984775e-1),
                (256, -10, 1.54e-1, 1.657779099, 9.155282792e-4),
            ];
            for (n, e, prior, kansa, ours) in data {
                let eps = Some(2f64.powi(e));
                out.push(row(&[n], eps, Source::Prior, None, prior));
                out.push(row(&[n], eps, Source::Method(K), Some(0.18), kansa));
                out.push(row(&[n], eps, Source::Method(C), Some(0.18), ours));
            }
        }
        ExampleId::Ex2 => {
            let data = [
                (7, 9.30e-3, 3.31818e-3, 2.64223e-4),
                (9, 5.92e-5, 3.03747e-4, 1.42617e-5),
                (11, 4.32e-6, 6.31077e-6, 2.11003e-7),
                (13, 1.10e-6, 1.06431e-7, 1.0773e-8),
            ];
            for (n, prior, kansa, ours) in data {
                out.push(row(&[n, n], None, Source::Prior, None, prior));
                out.push(row(&[n, n], None, Source::Method(K), Some(1.0), kansa));
                out.push(row(&[n, n], None, Source::Method(C), Some(1.0), ours));
            }
        }
        ExampleId::Ex3 => {
            let data = [
                ([8, 4], 1.103747e-2, 7.4357e-2, 2.1191e-3, 2.84849e-3),
                ([10, 6], 2.739293e-3, 1.58122e-3, 3.60844e-5, 3.10566e-4),
                ([16, 8], 2.707006e-4, 1.92361e-5, 5.17671e-7, 1.59593e-7),
                ([20, 12], 3.894511e-5, 3.60382e-9, 8.72329e-11, 6.0899e-11),
            ];
            for (g, prior, kansa, r1, r2) in data {
                out.push(row(&g, None, Source::Prior, None, prior));
                out.push(row(&g, None, Source::Method(K), Some(0.3041), kansa));
                out.push(row(&g, None, Source::Method(C), Some(0.4041), r1));
                out.push(row(&g, None, Source::Method(C), Some(0.01), r2));
            }
        }
        ExampleId::Ex4 => {
            out.push(row(&[9, 9], None, Source::Prior, Some(1.2), 1.28e-4));
            let data = [
                (5, 1.56591e-4, 8.12108e-9),
                (10, 3.89263e-11, 4.6856e-15),
                (15, 8.55909e-19, 3.36241e-23),
                (20, 4.57185e-27, 1.92864e-32),
            ];
            for (n, kansa, ours) in data {
                out.push(row(&[n, n], None, Source::Method(K), Some(0.01), kansa));
                out.push(row(&[n, n], None, Source::Method(C), Some(0.01), ours));
            }
        }
        ExampleId::Ex5 => {
            let data = [
                (5, 2.181029e-2, 1.56966e-2, 1.2886e-3, 2.31536e-2),
                (7, 6.910084e-3, 7.45327e-3, 1.34064e-5, 1.33894e-3),
                (10, 9.265197e-5, 5.75242e-4, 3.29045e-8, 5.32917e-6),
                (14, 1.138751e-5, 5.59595e-5, 4.62586e-11, 1.74509e-9),
                (20, 5.501057e-6, 1.34064e-6, 8.15272e-17, 1.42493e-15),
            ];
            for (n, prior, kansa, r1, r2) in data {
                out.push(row(&[n, n], None, Source::Prior, None, prior));
                out.push(row(&[n, n], None, Source::Method(K), Some(0.5641), kansa));
                out.push(row(&[n, n], None, Source::Method(C), Some(0.4641), r1));
                out.push(row(&[n, n], None, Source::Method(C), Some(0.01), r2));
            }
        }
        ExampleId::Ex6 => {
            let data = [
                ([5, 10], 4.09711e-2, 5.47254e-3),
                ([8, 16], 1.70686e-3, 1.09398e-4),
                ([10, 20], 9.94226e-5, 1.44713e-5),
                ([12, 24], 4.15599e-6, 2.80392e-6),
            ];
            for (g, kansa, ours) in data {
                out.push(row(&g, None, Source::Method(K), Some(0.01), kansa));
                out.push(row(&g, None, Source::Method(C), Some(0.01), ours));
            }
        }
        ExampleId::Ex7 => {
            let data = [
                (4, 3.8223e-5, 1.02919e-7),
                (5, 4.86452e-6, 1.49101e-8),
                (6, 6.73616e-7, 2.4369e-9),
                (7, 8.47629e-8, 3.43708e-10),
            ];
            for (n, kansa, ours) in data {
                out.push(row(&[n, n, n], None, Source::Method(K), Some(0.01), kansa));
                out.push(row(&[n, n, n], None, Source::Method(C), Some(0.01), ours));
            }
            out.push(row(&[7, 7, 7], None, Source::Prior, None, 1e-5));
        }
    }
    out
}

fn expr<T: Real>(value: fn(&[T]) -> T, jet: fn(&[Jet<T>]) -> Jet<T>) -> FieldRef<T> {
    ExprField::new(value, jet).into_ref()
}

fn zero<T: Real>(prec: Precision) -> FieldRef<T> {
    Arc::new(ConstantField(T::zero_at(prec)))
}

fn interval<T: Real>(lo: T, hi: T) -> (T, T) {
    (lo, hi)
}

/// `L u` for a known `u`, used where only the solution is specified. Only
/// values are available.
struct OperatorImage<T> {
    op: OperatorSpec<T>,
    u: FieldRef<T>,
}

impl<T: Real> Field<T> for OperatorImage<T> {
    fn value(&self, p: &[T]) -> T {
        self.op.apply(self.u.as_ref(), p)
    }

    fn partial(&self, p: &[T], orders: &[usize]) -> T {
        assert!(orders.iter().all(|&o| o == 0), "right-hand side derivatives are not available");
        self.value(p)
    }
}

/// Constants `(D, C)` of `u = (x+1)³/(3(2ε+1)) + D(x+1)^{1−1/ε}/(ε−1) + C`
/// from the two Robin conditions.
pub fn ex1_constants<T: Real>(eps: &T) -> Result<(T, T)> {
    let prec = eps.precision();
    let one = T::one_at(prec);
    let two = one.lit(2.0);
    let em1 = eps.clone() - &one;
    let q = one.lit(3.0) * &(eps.clone() * &two + &one);
    let inv_eps = one.clone() / eps;
    let p1 = two.powr(&(one.clone() - &inv_eps));
    let p0 = two.powr(&(-inv_eps));
    // u(0) − εu'(0) = 1 and u(1) + u'(1) = 1 in the unknowns (D, C)
    let a =
        Matrix::from_rows(&[vec![one.clone() / &em1 - &one, one.clone()], vec![p1 / &em1 + &(p0 / eps), one.clone()]]);
    let b = Matrix::column(vec![
        one.clone() - &((one.clone() - &(one.lit(3.0) * eps)) / &q),
        one.clone() - &(one.lit(20.0) / &q),
    ]);
    let (x, _) = lu_solve(&a, &b)?;
    Ok((x[(0, 0)].clone(), x[(1, 0)].clone()))
}

fn ex1_u<S: Elementary>(x: &S, eps: &S::Base, d: &S::Base, c: &S::Base) -> S {
    let one = x.lit(1.0);
    let xp = x.clone() + &one;
    let e = x.lift(eps);
    let expo = eps.lit(1.0) - &(eps.lit(1.0) / eps);
    let cubic = xp.powi(3) / &(x.lit(3.0) * &(e.clone() * &x.lit(2.0) + &one));
    cubic + &(x.lift(d) * &xp.powr(&expo) / &(e - &one)) + &x.lift(c)
}

/// Exact solution of ex1 for the given `ε`.
pub fn ex1_exact<T: Real>(eps: &T) -> Result<FieldRef<T>> {
    let (d, c) = ex1_constants(eps)?;
    let (e1, d1, c1) = (eps.clone(), d.clone(), c.clone());
    let e2 = eps.clone();
    Ok(ExprField::new(move |p: &[T]| ex1_u(&p[0], &e1, &d1, &c1), move |p: &[Jet<T>]| ex1_u(&p[0], &e2, &d, &c))
        .into_ref())
}

fn ex1<T: Real>(eps: T) -> Result<ProblemSpec<T>> {
    let prec = eps.precision();
    let (z, one) = (T::zero_at(prec), T::one_at(prec));
    let domain = BoxDomain::new(vec![interval(z.clone(), one.clone())])?;
    let op = OperatorSpec::new(vec![
        OperatorTerm { coeff: Coefficient::Constant(eps.clone()), orders: vec![2] },
        OperatorTerm { coeff: Coefficient::Variable(expr(ex1_coeff::<T>, ex1_coeff::<Jet<T>>)), orders: vec![1] },
    ])?;
    let conds = AxisConditions::from_rhs(vec![
        BoundaryFunctional::robin(one.clone(), -eps.clone(), z.clone())?.with_rhs(one.clone()),
        BoundaryFunctional::robin(one.clone(), one.clone(), one.clone())?.with_rhs(one.clone()),
    ])?;
    let f = expr(ex1_rhs::<T>, ex1_rhs::<Jet<T>>);
    Ok(ProblemSpec::new(domain, op, vec![conds], f)?.with_exact(ex1_exact(&eps)?))
}

fn ex1_coeff<S: Elementary>(p: &[S]) -> S {
    (p[0].lit(1.0) + &p[0]).recip()
}

fn ex1_rhs<S: Elementary>(p: &[S]) -> S {
    p[0].clone() + &p[0].lit(1.0)
}

fn ex2_u<S: Elementary>(p: &[S]) -> S {
    let (x, y) = (&p[0], &p[1]);
    let pi = x.pi();
    let s = |v: &S, n: i64, d: i64| (pi.clone() * v * &x.ratio(n, d)).sin();
    s(x, 1, 6) * &s(x, 7, 4) * &s(y, 3, 4) * &s(y, 5, 4)
}

fn ex2<T: Real>(prec: Precision) -> Result<ProblemSpec<T>> {
    let (z, one) = (T::zero_at(prec), T::one_at(prec));
    let domain = BoxDomain::new(vec![interval(z.clone(), one.clone()); 2])?;
    let op = OperatorSpec::laplacian(2, -one.clone());
    let u = expr(ex2_u::<T>, ex2_u::<Jet<T>>);
    let neumann = BoundaryFunctional::neumann(one.clone());
    let robin = BoundaryFunctional::robin(one.lit(2.0), one.clone(), one.clone())?;
    let cx = AxisConditions::new(
        vec![BoundaryFunctional::dirichlet(z.clone()), neumann.clone()],
        vec![zero(prec), neumann.along_axis(0, u.clone()).into_ref()],
    )?;
    let cy = AxisConditions::new(
        vec![BoundaryFunctional::dirichlet(z.clone()), robin.clone()],
        vec![zero(prec), robin.along_axis(1, u.clone()).into_ref()],
    )?;
    let f: FieldRef<T> = Arc::new(OperatorImage { op: op.clone(), u: u.clone() });
    Ok(ProblemSpec::new(domain, op, vec![cx, cy], f)?.with_exact(u))
}

fn ex3_u<S: Elementary>(p: &[S]) -> S {
    let (x, y) = (&p[0], &p[1]);
    let e = x.lit(1.0).exp();
    let e3 = x.lit(3.0).exp();
    let one = x.lit(1.0);
    let ym = y.clone() - &one;
    let first = (-y.clone()).exp()
        * &(-(e.clone() * &x.lit(2.0)) - &((y.clone() * &x.lit(2.0)).exp() * &x.lit(2.0))
            + &(y.exp() * &(one.clone() + &e) * &(x.lit(2.0) + &(ym.clone() * y))))
        * &x.sin()
        * &x.lit(3.0)
        / &(x.lit(4.0) * &(one.clone() + &e));
    let second = (-(y.clone() * &x.lit(3.0))).exp()
        * &(e3.clone() * &x.lit(2.0) + &((y.clone() * &x.lit(6.0)).exp() * &x.lit(2.0))
            - &((y.clone() * &x.lit(3.0)).exp() * &(one.clone() + &e3) * &(x.lit(2.0) + &(ym * y * &x.lit(9.0)))))
        * &(x.clone() * &x.lit(3.0)).sin()
        / &(x.lit(324.0) * &(one + &e3));
    first + &second
}

fn ex3_rhs<S: Elementary>(p: &[S]) -> S {
    let (x, y) = (&p[0], &p[1]);
    y.clone() * &(y.lit(1.0) - y) * &x.sin().powi(3)
}

fn dirichlet_pair<T: Real>(lo: &T, hi: &T, prec: Precision) -> Result<AxisConditions<T>> {
    AxisConditions::new(
        vec![BoundaryFunctional::dirichlet(lo.clone()), BoundaryFunctional::dirichlet(hi.clone())],
        vec![zero(prec), zero(prec)],
    )
}

fn ex3<T: Real>(prec: Precision) -> Result<ProblemSpec<T>> {
    let (z, one, pi) = (T::zero_at(prec), T::one_at(prec), T::pi_at(prec));
    let domain = BoxDomain::new(vec![interval(z.clone(), pi.clone()), interval(z.clone(), one.clone())])?;
    let op = OperatorSpec::laplacian(2, one.clone());
    let conds = vec![dirichlet_pair(&z, &pi, prec)?, dirichlet_pair(&z, &one, prec)?];
    let f = expr(ex3_rhs::<T>, ex3_rhs::<Jet<T>>);
    Ok(ProblemSpec::new(domain, op, conds, f)?.with_exact(expr(ex3_u::<T>, ex3_u::<Jet<T>>)))
}

fn ex4_u<S: Elementary>(p: &[S]) -> S {
    (p[0].clone() - &p[1]).exp() + &(p[0].exp() * &p[1].cos())
}

fn ex4_rhs<S: Elementary>(p: &[S]) -> S {
    (p[0].clone() - &p[1]).exp() * &p[0].lit(2.0)
}

fn ex4<T: Real>(prec: Precision) -> Result<ProblemSpec<T>> {
    let (z, one) = (T::zero_at(prec), T::one_at(prec));
    let domain = BoxDomain::new(vec![interval(z.clone(), one.clone()); 2])?;
    let u = expr(ex4_u::<T>, ex4_u::<Jet<T>>);
    let pair = || vec![BoundaryFunctional::dirichlet(z.clone()), BoundaryFunctional::dirichlet(one.clone())];
    let conds = vec![AxisConditions::from_solution(pair(), 0, &u)?, AxisConditions::from_solution(pair(), 1, &u)?];
    let f = expr(ex4_rhs::<T>, ex4_rhs::<Jet<T>>);
    Ok(ProblemSpec::new(domain, OperatorSpec::laplacian(2, one.clone()), conds, f)?.with_exact(u))
}

fn ex5_u<S: Elementary>(p: &[S]) -> S {
    let x = &p[0];
    -(x.sin() * &x.ratio(1, 4)) - &((x.clone() * &x.lit(3.0)).sin() * &x.ratio(1, 36))
}

fn ex5_rhs<S: Elementary>(p: &[S]) -> S {
    let s = p[0].sin();
    s.clone() - &s.powi(3)
}

fn ex5<T: Real>(prec: Precision) -> Result<ProblemSpec<T>> {
    let (z, one) = (T::zero_at(prec), T::one_at(prec));
    let half_pi = T::pi_at(prec) * &one.ratio(1, 2);
    let two = one.lit(2.0);
    let domain = BoxDomain::new(vec![interval(z.clone(), half_pi.clone()), interval(z.clone(), two.clone())])?;
    let cx = AxisConditions::new(
        vec![BoundaryFunctional::dirichlet(z.clone()), BoundaryFunctional::neumann(half_pi)],
        vec![zero(prec), zero(prec)],
    )?;
    let cy = AxisConditions::new(
        vec![BoundaryFunctional::neumann(z.clone()), BoundaryFunctional::neumann(two)],
        vec![zero(prec), zero(prec)],
    )?;
    let f = expr(ex5_rhs::<T>, ex5_rhs::<Jet<T>>);
    Ok(ProblemSpec::new(domain, OperatorSpec::laplacian(2, one), vec![cx, cy], f)?
        .with_exact(expr(ex5_u::<T>, ex5_u::<Jet<T>>)))
}

fn ex6_u<S: Elementary>(p: &[S]) -> S {
    let (x, y) = (&p[0], &p[1]);
    let pi = x.pi();
    let epx = (pi.clone() * x).exp();
    let one = x.lit(1.0);
    let a = (epx.clone() - &one) * &(epx - &pi.exp()) * &(pi.clone() * y * &x.ratio(5, 6)).sin();
    let poly = y.clone() * &(x.ratio(3, 5) - y) * &(x.ratio(6, 5) - y) * &(x.ratio(9, 5) - y);
    let b = (pi.clone() * &poly).exp() * &(pi * x).sin();
    (a + &b) * &x.ratio(1, 500)
}

fn ex6<T: Real>(prec: Precision) -> Result<ProblemSpec<T>> {
    let (z, one) = (T::zero_at(prec), T::one_at(prec));
    let two = one.lit(2.0);
    let domain = BoxDomain::new(vec![interval(z.clone(), one.clone()), interval(z.clone(), two.clone())])?;
    let u = expr(ex6_u::<T>, ex6_u::<Jet<T>>);
    let op = OperatorSpec::laplacian(2, one.clone());
    let cx = dirichlet_pair(&z, &one, prec)?;
    let multipoint = BoundaryFunctional::multipoint(
        z.clone(),
        vec![
            (one.ratio(1, 4), one.ratio(3, 5)),
            (one.ratio(1, 2), one.ratio(6, 5)),
            (one.ratio(1, 4), one.ratio(9, 5)),
        ],
        z.clone(),
    )?;
    let top = BoundaryFunctional::dirichlet(two);
    let cy =
        AxisConditions::new(vec![multipoint, top.clone()], vec![zero(prec), top.along_axis(1, u.clone()).into_ref()])?;
    let f: FieldRef<T> = Arc::new(OperatorImage { op: op.clone(), u: u.clone() });
    Ok(ProblemSpec::new(domain, op, vec![cx, cy], f)?.with_exact(u))
}

fn ex7_u<S: Elementary>(p: &[S]) -> S {
    (p[0].lit(4.0) + &p[0] + &p[1] + &p[2]).recip()
}

fn ex7_rhs<S: Elementary>(p: &[S]) -> S {
    (p[0].lit(4.0) + &p[0] + &p[1] + &p[2]).powi(-3) * &p[0].lit(6.0)
}

fn ex7<T: Real>(prec: Precision) -> Result<ProblemSpec<T>> {
    let one = T::one_at(prec);
    let half = one.ratio(1, 2);
    let domain = BoxDomain::new(vec![interval(-half.clone(), half.clone()); 3])?;
    let u = expr(ex7_u::<T>, ex7_u::<Jet<T>>);
    let conds = (0..3)
        .map(|k| {
            AxisConditions::from_solution(
                vec![BoundaryFunctional::dirichlet(-half.clone()), BoundaryFunctional::dirichlet(half.clone())],
                k,
                &u,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let f = expr(ex7_rhs::<T>, ex7_rhs::<Jet<T>>);
    Ok(ProblemSpec::new(domain, OperatorSpec::laplacian(3, one), conds, f)?.with_exact(u))
}
