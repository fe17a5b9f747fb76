//! Interpretation of diagrams as linear maps by tensor contraction.
//!
//! Every edge is a shared qubit index. A spider contributes
//! `|a..a><a..a| + c e^{i theta} |b..b><b..b|` with kets on its out-legs and
//! bras on its in-legs, where `(a, b)` is the colour's basis: Z for green, X for
//! red, Y for blue. In RGB the red term carries `c = (-i)^{n-m}` for `m` in-legs
//! and `n` out-legs; otherwise `c = 1`. Decorations other than Hadamard are
//! expanded to their defining composites first.

mod matrix;
pub(crate) mod tensor;

use thiserror::Error;

use crate::cyclo::{CycloError, CycloNum};
use crate::diagram::{Color, Decoration, Diagram, End, Endpoint, Flavour, Phase, PhaseGroup, Violation};
use crate::scalar::Scalar;
use crate::ApproxNum;

pub use matrix::Matrix;
use tensor::{contract_network, Tensor};

/// Tolerance used for float comparisons unless a caller picks another.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("invalid diagram: {0}")]
    Invalid(Violation),
    #[error("phase {0} has no exact value; use float evaluation")]
    PhaseNotExact(Phase),
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// Normalized basis kets `(a, b)` of a colour.
fn basis<S: Scalar>(c: Color) -> [[S; 2]; 2] {
    let h = S::inv_sqrt2();
    let i = S::omega_pow(2);
    match c {
        Color::Green => [[S::one(), S::zero()], [S::zero(), S::one()]],
        Color::Red => [[h.clone(), h.clone()], [h.clone(), -h]],
        Color::Blue => [[h.clone(), h.clone() * i.clone()], [h.clone(), -(h * i)]],
    }
}

/// Spider tensor entries; `outs[j]` tells whether leg `j` is an out-leg.
pub(crate) fn spider_entries<S: Scalar>(
    flavour: Flavour,
    color: Color,
    phase: Phase,
    outs: &[bool],
) -> Result<Vec<S>, InterpError> {
    let [a, b] = basis::<S>(color);
    let (ac, bc) = (
        [a[0].conj(), a[1].conj()],
        [b[0].conj(), b[1].conj()],
    );
    let n_out = outs.iter().filter(|&&o| o).count() as i64;
    let n_in = outs.len() as i64 - n_out;
    let mut coeff = S::from_phase(phase).ok_or(InterpError::PhaseNotExact(phase))?;
    if color == Color::Red && flavour == Flavour::Rgb {
        coeff = coeff * S::omega_pow(-2 * (n_out - n_in));
    }
    let len = outs.len();
    let mut data = Vec::with_capacity(1 << len);
    for x in 0..(1usize << len) {
        let mut t1 = S::one();
        let mut t2 = coeff.clone();
        for (j, &out) in outs.iter().enumerate() {
            let bit = (x >> (len - 1 - j)) & 1;
            let (u, v) = if out { (&a, &b) } else { (&ac, &bc) };
            t1 = t1 * u[bit].clone();
            t2 = t2 * v[bit].clone();
        }
        data.push(t1 + t2);
    }
    Ok(data)
}

fn hadamard<S: Scalar>() -> Vec<S> {
    let h = S::inv_sqrt2();
    vec![h.clone(), h.clone(), h.clone(), -h]
}

/// Evaluates `d` over the scalar `S`. Outputs index rows and inputs index
/// columns, with port 0 as the most significant bit.
pub fn eval<S: Scalar>(d: &Diagram) -> Result<Matrix<S>, InterpError> {
    d.validate().map_err(InterpError::Invalid)?;
    let d = d.expand_decorations().without_closed_components();
    let flavour = d.flavour();

    // Labels at the source and target end of every edge.
    let mut ends = Vec::with_capacity(d.edges().len());
    let mut tensors: Vec<Tensor<S>> = Vec::new();
    let mut fresh = 0u32;
    for e in d.edges() {
        let s = fresh;
        fresh += 1;
        let needs_gate = e.decoration == Decoration::Hadamard || (e.source.is_port() && e.target.is_port());
        let t = if needs_gate {
            fresh += 1;
            let data = if e.decoration == Decoration::Hadamard {
                hadamard()
            } else {
                vec![S::one(), S::zero(), S::zero(), S::one()]
            };
            tensors.push(Tensor {
                legs: vec![s + 1, s],
                data,
            });
            s + 1
        } else {
            s
        };
        ends.push((s, t));
    }

    for node in d.nodes() {
        let legs = d.legs(node.id);
        let outs: Vec<bool> = legs.iter().map(|(_, end)| *end == End::Source).collect();
        let labels = legs
            .iter()
            .map(|&(i, end)| if end == End::Source { ends[i].0 } else { ends[i].1 })
            .collect();
        let data = spider_entries::<S>(flavour, node.color, node.phase, &outs)?;
        tensors.push(Tensor { legs: labels, data }.trace_repeats());
    }

    let port_label = |p: Endpoint| -> u32 {
        let i = d.port_edge(p).expect("validated port");
        if d.edges()[i].source == p {
            ends[i].0
        } else {
            ends[i].1
        }
    };
    let order: Vec<u32> = (0..d.n_outputs())
        .map(|k| port_label(Endpoint::Output(k)))
        .chain((0..d.n_inputs()).map(|k| port_label(Endpoint::Input(k))))
        .collect();

    let result = contract_network(tensors).permute(&order);
    Ok(Matrix::from_vec(
        1 << d.n_outputs(),
        1 << d.n_inputs(),
        result.data,
    ))
}

/// Exact evaluation; fails on U(1) phases.
pub fn eval_exact(d: &Diagram) -> Result<Matrix<CycloNum>, InterpError> {
    eval::<CycloNum>(d)
}

/// Floating-point evaluation; accepts either phase group.
pub fn eval_float(d: &Diagram) -> Result<Matrix<ApproxNum>, InterpError> {
    eval::<ApproxNum>(d)
}

/// Equality up to a nonzero scalar.
pub fn equal_up_to_scalar<S: Scalar>(m: &Matrix<S>, n: &Matrix<S>, tol: f64) -> Result<bool, InterpError> {
    m.proportional_to(n, tol)
        .ok_or(InterpError::DimensionMismatch(m.rows(), m.cols(), n.rows(), n.cols()))
}

/// Semantic equality of two diagrams: exact when both have C4 phases,
/// floating point with `tol` otherwise.
pub fn diagrams_equal(a: &Diagram, b: &Diagram, tol: f64) -> Result<bool, InterpError> {
    if a.phase_group() == PhaseGroup::C4 && b.phase_group() == PhaseGroup::C4 {
        equal_up_to_scalar(&eval_exact(a)?, &eval_exact(b)?, 0.0)
    } else {
        equal_up_to_scalar(&eval_float(a)?, &eval_float(b)?, tol)
    }
}

/// Whether `eval(dagger(d))` is the conjugate transpose of `eval(d)` up to
/// scalar.
pub fn check_dagger_functor(d: &Diagram) -> Result<bool, InterpError> {
    if d.phase_group() == PhaseGroup::C4 {
        let m = eval_exact(d)?;
        equal_up_to_scalar(&m.conj_transpose(), &eval_exact(&d.dagger())?, 0.0)
    } else {
        let m = eval_float(d)?;
        equal_up_to_scalar(&m.conj_transpose(), &eval_float(&d.dagger())?, DEFAULT_TOL)
    }
}

/// Generator shapes of the calculi.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Unit(Color),
    Counit(Color),
    Mul(Color),
    Comul(Color),
    Rot(Color, Phase),
    Hadamard,
}

impl Generator {
    /// The generator as a one-node diagram (a decorated wire for Hadamard).
    pub fn to_diagram(self, flavour: Flavour) -> Diagram {
        let (color, phase, m, n) = match self {
            Generator::Hadamard => {
                let mut d = Diagram::new(flavour, 1, 1);
                d.connect_with(Endpoint::Input(0), Endpoint::Output(0), Decoration::Hadamard);
                return d;
            }
            Generator::Unit(c) => (c, Phase::c4(0), 0, 1),
            Generator::Counit(c) => (c, Phase::c4(0), 1, 0),
            Generator::Mul(c) => (c, Phase::c4(0), 2, 1),
            Generator::Comul(c) => (c, Phase::c4(0), 1, 2),
            Generator::Rot(c, p) => (c, p, 1, 1),
        };
        let mut d = Diagram::new(flavour, m, n);
        let v = d.add_node(color, phase);
        for k in 0..m {
            d.connect(Endpoint::Input(k), v);
        }
        for k in 0..n {
            d.connect(v, Endpoint::Output(k));
        }
        d
    }

    /// Inverse under the dagger.
    pub fn dagger(self) -> Generator {
        match self {
            Generator::Unit(c) => Generator::Counit(c),
            Generator::Counit(c) => Generator::Unit(c),
            Generator::Mul(c) => Generator::Comul(c),
            Generator::Comul(c) => Generator::Mul(c),
            Generator::Rot(c, p) => Generator::Rot(c, p.neg()),
            Generator::Hadamard => Generator::Hadamard,
        }
    }

    /// All C4 generators of a flavour.
    pub fn all(flavour: Flavour) -> Vec<Generator> {
        let mut out = Vec::new();
        for &c in flavour.colours() {
            out.extend([
                Generator::Unit(c),
                Generator::Counit(c),
                Generator::Mul(c),
                Generator::Comul(c),
            ]);
            out.extend((0..4).map(|k| Generator::Rot(c, Phase::c4(k))));
        }
        if flavour.is_dichromatic() {
            out.push(Generator::Hadamard);
        }
        out
    }
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::Unit(c) => write!(f, "unit_{c}"),
            Generator::Counit(c) => write!(f, "counit_{c}"),
            Generator::Mul(c) => write!(f, "mul_{c}"),
            Generator::Comul(c) => write!(f, "comul_{c}"),
            Generator::Rot(c, p) => write!(f, "rot_{c}({p})"),
            Generator::Hadamard => write!(f, "H"),
        }
    }
}

/// Exact matrices of every generator of a flavour.
pub fn generator_table(flavour: Flavour) -> Vec<(Generator, Matrix<CycloNum>)> {
    Generator::all(flavour)
        .into_iter()
        .map(|g| {
            let m = eval_exact(&g.to_diagram(flavour)).expect("generators evaluate");
            (g, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;
    use num_traits::{One, Zero};

    // Oracle kets, written out by hand.
    fn c(n: i64) -> CycloNum {
        CycloNum::from_int(n)
    }
    fn i() -> CycloNum {
        CycloNum::i()
    }
    fn col(v: Vec<CycloNum>) -> Matrix<CycloNum> {
        Matrix::from_vec(v.len(), 1, v)
    }
    fn ket(name: &str) -> Matrix<CycloNum> {
        match name {
            "0" => col(vec![c(1), c(0)]),
            "1" => col(vec![c(0), c(1)]),
            "+" => col(vec![c(1), c(1)]),
            "-" => col(vec![c(1), c(-1)]),
            "i" => col(vec![c(1), i()]),
            "-i" => col(vec![c(1), -i()]),
            _ => unreachable!(),
        }
    }
    fn kets(names: &[&str]) -> Matrix<CycloNum> {
        names
            .iter()
            .fold(Matrix::identity(1), |acc, n| acc.kron(&ket(n)))
    }
    fn add(a: &Matrix<CycloNum>, b: &Matrix<CycloNum>) -> Matrix<CycloNum> {
        Matrix::from_fn(a.rows(), a.cols(), |r, cc| a.get(r, cc).clone() + b.get(r, cc).clone())
    }
    fn outer(k: &[&str], b: &[&str]) -> Matrix<CycloNum> {
        kets(k).mul(&kets(b).conj_transpose()).unwrap()
    }
    fn same(a: &Matrix<CycloNum>, b: &Matrix<CycloNum>) -> bool {
        equal_up_to_scalar(a, b, 0.0).unwrap()
    }
    fn ev(src: &str) -> Matrix<CycloNum> {
        eval_exact(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn units_match_kets() {
        assert!(same(&ev("diagram rg { outputs o; node n: green 0; wire n -> o; }"), &ket("+")));
        assert!(same(&ev("diagram rg { outputs o; node n: red 0; wire n -> o; }"), &ket("0")));
        assert!(same(&ev("diagram rgb { outputs o; node n: red 0; wire n -> o; }"), &ket("i")));
        assert!(same(&ev("diagram rgb { outputs o; node n: blue 0; wire n -> o; }"), &ket("0")));
    }

    #[test]
    fn rgb_red_comul_carries_minus_i() {
        let want = add(&outer(&["+", "+"], &["+"]), &outer(&["-", "-"], &["-"]).scale(&-i()));
        let got = ev("diagram rgb { inputs a; outputs x y; node n: red 0; wire a -> n; wire n -> x; wire n -> y; }");
        assert!(same(&got, &want));
        let wrong = add(&outer(&["+", "+"], &["+"]), &outer(&["-", "-"], &["-"]));
        assert!(!same(&got, &wrong));
    }

    #[test]
    fn blue_rotation() {
        // |i><i| + i |-i><-i|
        let want = add(&outer(&["i"], &["i"]), &outer(&["-i"], &["-i"]).scale(&i()));
        let got = ev("diagram rgb { inputs a; outputs b; node n: blue 1; wire a -> n; wire n -> b; }");
        assert!(same(&got, &want));
    }

    #[test]
    fn supplementarity_lhs_is_minus_projector() {
        let src = "diagram rg { inputs a; outputs b; node s: green 0; node p: red 1; node q: red 1; node t: green 0;
            wire a -> s; wire s -> p; wire s -> q; wire p -> t; wire q -> t; wire t -> b; }";
        assert!(same(&ev(src), &outer(&["-"], &["-"])));
    }

    #[test]
    fn euler_decomposition_of_h() {
        let h = ev("diagram rg { inputs a; outputs b; wire a -> b [h]; }");
        let e = ev("diagram rg { inputs a; outputs b; node x: green 1; node y: red 1; node z: green 1;
            wire a -> x; wire x -> y; wire y -> z; wire z -> b; }");
        assert!(same(&h, &e));
        let want = Matrix::from_vec(2, 2, vec![c(1), c(1), c(1), c(-1)]);
        assert!(same(&h, &want));
    }

    #[test]
    fn tensor_of_unit_and_counit() {
        let src = "diagram rg { inputs a; outputs b; node g: green 0; node r: red 0; wire g -> b; wire a -> r; }";
        assert!(same(&ev(src), &outer(&["+"], &["0"])));
    }

    #[test]
    fn closed_components_are_dropped() {
        let src = "diagram rgb { inputs a; outputs b; node x: red 2; node y: blue 0; wire a -> b; wire x -> y; }";
        assert_eq!(ev(src), Matrix::identity(2));
    }

    #[test]
    fn empty_and_wires() {
        assert_eq!(ev("diagram rg { }"), Matrix::identity(1));
        let swap = ev("diagram rg { inputs a c; outputs b d; wire a -> d; wire c -> b; }");
        assert_eq!(swap.get(1, 2), &CycloNum::one());
        assert_eq!(swap.get(1, 1), &CycloNum::zero());
    }

    #[test]
    fn self_loop_is_traced() {
        let src = "diagram rg { inputs a; outputs b; node n: green 0; wire a -> n; wire n -> b; wire n -> n; }";
        assert!(same(&ev(src), &Matrix::identity(2)));
    }

    #[test]
    fn scaled_and_unscaled_agree() {
        let m = ev("diagram rgb { inputs a; outputs b; node n: red 3; wire a -> n; wire n -> b; }");
        assert!(same(&m.scale(&CycloNum::omega_pow(1)), &m));
        let d1 = Matrix::from_vec(2, 2, vec![c(1), c(0), c(0), i()]);
        let d2 = Matrix::from_vec(2, 2, vec![c(1), c(0), c(0), -i()]);
        assert!(!same(&d1, &d2));
    }

    #[test]
    fn float_matches_exact() {
        let d = parse("diagram rgb { inputs a; outputs b c; node n: blue 1; node m: red 3;
            wire a -> n; wire n -> m; wire m -> b [dualY]; wire n -> c [cw]; }")
        .unwrap();
        let exact = eval_exact(&d).unwrap().to_approx().unwrap();
        let float = eval_float(&d).unwrap();
        assert!(equal_up_to_scalar(&float, &exact, 1e-9).unwrap());
        let rot = parse("diagram rg { inputs a; outputs b; node n: green rad 0.7853981633974483; wire a -> n; wire n -> b; }").unwrap();
        let m = eval_float(&rot).unwrap();
        let want = ApproxNum::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((m.get(1, 1) / m.get(0, 0) - want).norm() < 1e-12);
        assert!(matches!(eval_exact(&rot), Err(InterpError::PhaseNotExact(_))));
    }

    #[test]
    fn generator_table_is_dagger_consistent() {
        for fl in [Flavour::Rg, Flavour::Rgb] {
            let table = generator_table(fl);
            for (g, m) in &table {
                let (_, md) = table.iter().find(|(h, _)| *h == g.dagger()).unwrap();
                assert!(same(&m.conj_transpose(), md), "{g}");
            }
        }
    }
}
