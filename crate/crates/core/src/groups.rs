//! Finite groups: enumeration of matrix groups modulo scalars, presentations
//! and relator checks, and the S4 model of the single-qubit rotation group.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cyclo::{CycloField, CycloNum};
use crate::diagram::{Color, Flavour, Phase};
use crate::interp::{eval_exact, Generator, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("generator {0} is not a square invertible matrix")]
    NotInvertible(usize),
    #[error("generators have different dimensions")]
    DimensionMismatch,
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("bad word '{0}'")]
    BadWord(String),
}

/// Elements that can be multiplied and hashed.
pub trait GroupElement: Clone + Eq + Hash {
    /// `self * rhs`: apply `rhs` first, then `self`.
    fn compose(&self, rhs: &Self) -> Self;
}

/// A matrix modulo nonzero scalars. Equality and hashing use the entries
/// divided by the first nonzero entry in row-major order.
#[derive(Clone, Debug)]
pub struct PhaseClassMatrix {
    rep: Matrix<CycloNum>,
    key: Vec<CycloField>,
}

impl PhaseClassMatrix {
    /// `None` for the zero matrix.
    pub fn new(m: Matrix<CycloNum>) -> Option<PhaseClassMatrix> {
        let pivot = m.entries().iter().find(|z| !z.is_zero())?.to_field();
        let key = m
            .entries()
            .iter()
            .map(|z| z.to_field().div(&pivot).expect("pivot is nonzero"))
            .collect();
        Some(PhaseClassMatrix { rep: m, key })
    }

    pub fn identity(n: usize) -> PhaseClassMatrix {
        PhaseClassMatrix::new(Matrix::identity(n)).expect("identity is nonzero")
    }

    /// Some representative of the class.
    pub fn matrix(&self) -> &Matrix<CycloNum> {
        &self.rep
    }

    /// The normalised entries.
    pub fn canonical(&self) -> &[CycloField] {
        &self.key
    }
}

impl PartialEq for PhaseClassMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rep.rows() == other.rep.rows() && self.key == other.key
    }
}

impl Eq for PhaseClassMatrix {}

impl Hash for PhaseClassMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rep.rows().hash(state);
        self.key.hash(state);
    }
}

impl GroupElement for PhaseClassMatrix {
    fn compose(&self, rhs: &Self) -> Self {
        let m = self.rep.mul(&rhs.rep).expect("square matrices of one size");
        PhaseClassMatrix::new(m).expect("product of invertible matrices")
    }
}

/// A permutation of `0..n`, `p[x]` being the image of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n).collect())
    }

    /// Swap of `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut p = Perm::identity(n);
        p.0.swap(a, b);
        p
    }
}

impl GroupElement for Perm {
    fn compose(&self, rhs: &Self) -> Self {
        Perm(rhs.0.iter().map(|&x| self.0[x]).collect())
    }
}

/// A finite group closed from generators. Element 0 is the identity and
/// elements appear in BFS order.
#[derive(Clone, Debug)]
pub struct GroupTable<T> {
    pub elements: Vec<T>,
    /// `table[i][j]` is the index of `elements[i] * elements[j]`.
    pub table: Vec<Vec<usize>>,
    /// Indices of the generators.
    pub generators: Vec<usize>,
}

impl<T: GroupElement> GroupTable<T> {
    pub fn close(identity: T, gens: &[T]) -> GroupTable<T> {
        let mut index: HashMap<T, usize> = HashMap::from([(identity.clone(), 0)]);
        let mut elements = vec![identity];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let x = g.compose(&elements[i]);
                if !index.contains_key(&x) {
                    index.insert(x.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(x);
                }
            }
        }
        let table = elements
            .iter()
            .map(|a| elements.iter().map(|b| index[&a.compose(b)]).collect())
            .collect();
        let generators = gens.iter().map(|g| index[g]).collect();
        GroupTable {
            elements,
            table,
            generators,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, x: &T) -> Option<usize> {
        self.elements.iter().position(|e| e == x)
    }
}

impl<T> GroupTable<T> {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.table.len())
            .find(|&b| self.table[a][b] == 0)
            .expect("finite group elements are invertible")
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inverse(a) } else { a };
        (0..k.unsigned_abs()).fold(0, |acc, _| self.mul(acc, base))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != 0 {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }

    /// Evaluates a word, reading letters left to right as a product.
    pub fn eval_word(&self, word: &Word, assignment: &HashMap<String, usize>) -> Result<usize, GroupError> {
        word.0.iter().try_fold(0, |acc, (g, k)| {
            let x = *assignment.get(g).ok_or_else(|| GroupError::UnknownGenerator(g.clone()))?;
            Ok(self.mul(acc, self.pow(x, *k)))
        })
    }
}

/// The matrix group generated by `gens` modulo scalars.
pub fn enumerate_group(gens: &[Matrix<CycloNum>]) -> Result<GroupTable<PhaseClassMatrix>, GroupError> {
    let n = gens.first().map_or(1, Matrix::rows);
    let mut classes = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        if g.rows() != g.cols() {
            return Err(GroupError::NotInvertible(k));
        }
        if g.rows() != n {
            return Err(GroupError::DimensionMismatch);
        }
        if !invertible(g) {
            return Err(GroupError::NotInvertible(k));
        }
        classes.push(PhaseClassMatrix::new(g.clone()).expect("invertible"));
    }
    Ok(GroupTable::close(PhaseClassMatrix::identity(n), &classes))
}

/// Exact invertibility by Gaussian elimination over `Q(w)`.
fn invertible(m: &Matrix<CycloNum>) -> bool {
    let n = m.rows();
    let mut a: Vec<Vec<CycloField>> = (0..n)
        .map(|r| (0..n).map(|c| m.get(r, c).to_field()).collect())
        .collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return false;
        };
        a.swap(col, p);
        let inv = a[col][col].inverse().expect("nonzero pivot");
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].mul(&inv);
            let pivot_row = a[col].clone();
            for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *x = x.sub(&f.mul(p));
            }
        }
    }
    true
}

/// Histogram of element orders.
pub fn order_profile<T>(g: &GroupTable<T>) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for a in 0..g.table.len() {
        *out.entry(g.element_order(a)).or_insert(0) += 1;
    }
    out
}

/// A word: generator names with integer exponents, read as a product.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Word(pub Vec<(String, i64)>);

impl Word {
    /// Parses `"r^2 g b^-1"`. Letters are separated by whitespace.
    pub fn parse(s: &str) -> Result<Word, GroupError> {
        let bad = || GroupError::BadWord(s.to_string());
        let mut out = Vec::new();
        for tok in s.split_whitespace() {
            let (name, k) = match tok.split_once('^') {
                Some((n, k)) => (n, k.parse::<i64>().map_err(|_| bad())?),
                None => (tok, 1),
            };
            if name.is_empty() {
                return Err(bad());
            }
            out.push((name.to_string(), k));
        }
        Ok(Word(out))
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|(g, k)| (g.clone(), -k)).collect())
    }

    pub fn concat(&self, rhs: &Word) -> Word {
        Word(self.0.iter().chain(&rhs.0).cloned().collect())
    }

    /// Replaces each letter by its image word.
    pub fn substitute(&self, images: &HashMap<String, Word>) -> Result<Word, GroupError> {
        let mut out = Word::default();
        for (g, k) in &self.0 {
            let w = images.get(g).ok_or_else(|| GroupError::UnknownGenerator(g.clone()))?;
            let w = if *k < 0 { w.inverse() } else { w.clone() };
            for _ in 0..k.unsigned_abs() {
                out = out.concat(&w);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, k)| if *k == 1 { g.clone() } else { format!("{g}^{k}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    /// Relators are words; `"u = v"` stands for `u v^-1`.
    pub fn new(generators: &[&str], relators: &[&str]) -> Result<Presentation, GroupError> {
        let relators = relators
            .iter()
            .map(|r| match r.split_once('=') {
                Some((u, v)) => Ok(Word::parse(u)?.concat(&Word::parse(v)?.inverse())),
                None => Word::parse(r),
            })
            .collect::<Result<_, _>>()?;
        Ok(Presentation {
            generators: generators.iter().map(|g| g.to_string()).collect(),
            relators,
        })
    }

    /// `r^4, g^4, b^4, r^2 g^2 b^2, gr = bg = rb`.
    pub fn rotations() -> Presentation {
        Presentation::new(
            &["r", "g", "b"],
            &["r^4", "g^4", "b^4", "r^2 g^2 b^2", "g r = b g", "b g = r b"],
        )
        .expect("well-formed")
    }

    /// The Coxeter presentation of S4 on adjacent transpositions.
    pub fn s4() -> Presentation {
        Presentation::new(
            &["t1", "t2", "t3"],
            &["t1^2", "t2^2", "t3^2", "t1 t2 t1 t2 t1 t2", "t2 t3 t2 t3 t2 t3", "t1 t3 t1 t3"],
        )
        .expect("well-formed")
    }
}

/// Verdict per relator.
pub fn relator_verdicts<T>(
    p: &Presentation,
    g: &GroupTable<T>,
    assignment: &HashMap<String, usize>,
) -> Result<Vec<(Word, bool)>, GroupError> {
    p.relators
        .iter()
        .map(|r| Ok((r.clone(), g.eval_word(r, assignment)? == 0)))
        .collect()
}

pub fn check_relators<T>(
    p: &Presentation,
    g: &GroupTable<T>,
    assignment: &HashMap<String, usize>,
) -> Result<bool, GroupError> {
    Ok(relator_verdicts(p, g, assignment)?.iter().all(|(_, ok)| *ok))
}

/// The single-qubit rotation group: `[[rot_r(1)]], [[rot_g(1)]], [[rot_b(1)]]`.
pub fn rotation_group() -> GroupTable<PhaseClassMatrix> {
    let gens: Vec<_> = [Color::Red, Color::Green, Color::Blue]
        .iter()
        .map(|&c| {
            eval_exact(&Generator::Rot(c, Phase::c4(1)).to_diagram(Flavour::Rgb)).expect("generators evaluate")
        })
        .collect();
    enumerate_group(&gens).expect("rotations are invertible")
}

/// S4 as permutations of four points, generated by `t1, t2, t3`.
pub fn s4_group() -> GroupTable<Perm> {
    let gens: Vec<Perm> = (0..3).map(|i| Perm::transposition(4, i, i + 1)).collect();
    GroupTable::close(Perm::identity(4), &gens)
}

/// A group with named generators.
pub struct Named<'a, T> {
    pub group: &'a GroupTable<T>,
    pub names: &'a [&'a str],
}

impl<T> Named<'_, T> {
    pub fn assignment(&self) -> HashMap<String, usize> {
        self.names
            .iter()
            .zip(&self.group.generators)
            .map(|(n, &i)| (n.to_string(), i))
            .collect()
    }
}

/// Checks that `f: B -> A` and `g: A -> B`, given as words on generators,
/// compose to the identity on generators in both orders. Each generator of
/// `a` is compared with the evaluation of `f(g(x))` in `a`, and likewise in
/// `b`.
pub fn check_iso_pair<A, B>(
    a: &Named<'_, A>,
    b: &Named<'_, B>,
    f: &HashMap<String, Word>,
    g: &HashMap<String, Word>,
) -> Result<bool, GroupError> {
    let (asg_a, asg_b) = (a.assignment(), b.assignment());
    for name in a.names {
        let there = Word(vec![(name.to_string(), 1)]).substitute(g)?;
        let back = there.substitute(f)?;
        if a.group.eval_word(&back, &asg_a)? != asg_a[*name] {
            return Ok(false);
        }
    }
    for name in b.names {
        let there = Word(vec![(name.to_string(), 1)]).substitute(f)?;
        let back = there.substitute(g)?;
        if b.group.eval_word(&back, &asg_b)? != asg_b[*name] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f`: S4 generators to words in the rotations.
pub fn f_map() -> HashMap<String, Word> {
    word_map(&[("t1", "b r^2"), ("t2", "b^2 g"), ("t3", "g r g")])
}

/// `g`: rotations to words in S4 generators.
pub fn g_map() -> HashMap<String, Word> {
    word_map(&[("r", "t1 t2 t3"), ("g", "t3 t1 t2"), ("b", "t1 t2 t3 t1 t2")])
}

pub fn word_map(pairs: &[(&str, &str)]) -> HashMap<String, Word> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), Word::parse(v).expect("well-formed word")))
        .collect()
}

/// Assignment sending each key of `map` to its word evaluated in `target`.
pub fn images<T>(
    map: &HashMap<String, Word>,
    target: &Named<'_, T>,
) -> Result<HashMap<String, usize>, GroupError> {
    let asg = target.assignment();
    map.iter()
        .map(|(k, w)| Ok((k.clone(), target.group.eval_word(w, &asg)?)))
        .collect()
}

/// Matrices with entries in the ring, for tests and callers that build
/// their own generators.
pub fn diag(entries: &[CycloNum]) -> Matrix<CycloNum> {
    let n = entries.len();
    Matrix::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { CycloNum::zero() })
}

pub fn identity_matrix(n: usize) -> Matrix<CycloNum> {
    diag(&vec![CycloNum::one(); n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_trivial_groups() {
        let s = enumerate_group(&[diag(&[CycloNum::one(), CycloNum::i()])]).unwrap();
        assert_eq!(s.order(), 4);
        assert_eq!(order_profile(&s), BTreeMap::from([(1, 1), (2, 1), (4, 2)]));
        let t = enumerate_group(&[identity_matrix(2)]).unwrap();
        assert_eq!(t.order(), 1);
        assert_eq!(order_profile(&t), BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn singular_generator_is_rejected() {
        let z = diag(&[CycloNum::one(), CycloNum::zero()]);
        assert_eq!(enumerate_group(&[z]).unwrap_err(), GroupError::NotInvertible(0));
    }

    #[test]
    fn s4_profile_by_brute_force() {
        let s4 = s4_group();
        assert_eq!(s4.order(), 24);
        assert_eq!(order_profile(&s4), BTreeMap::from([(1, 1), (2, 9), (3, 8), (4, 6)]));
        let named = Named { group: &s4, names: &["t1", "t2", "t3"] };
        assert!(check_relators(&Presentation::s4(), &s4, &named.assignment()).unwrap());
    }

    #[test]
    fn rotation_group_is_s4() {
        let g = rotation_group();
        let s4 = s4_group();
        assert_eq!(g.order(), 24);
        assert_eq!(order_profile(&g), order_profile(&s4));
        let rg = Named { group: &g, names: &["r", "g", "b"] };
        let sg = Named { group: &s4, names: &["t1", "t2", "t3"] };
        assert!(check_relators(&Presentation::rotations(), &g, &rg.assignment()).unwrap());
        let via_f = images(&f_map(), &rg).unwrap();
        assert!(check_relators(&Presentation::s4(), &g, &via_f).unwrap());
        let via_g = images(&g_map(), &sg).unwrap();
        assert!(check_relators(&Presentation::rotations(), &s4, &via_g).unwrap());
        assert!(check_iso_pair(&rg, &sg, &f_map(), &g_map()).unwrap());
    }

    #[test]
    fn negative_controls() {
        let g = rotation_group();
        let rg = Named { group: &g, names: &["r", "g", "b"] };
        let square = Presentation::new(&["r"], &["r^2"]).unwrap();
        assert!(!check_relators(&square, &g, &rg.assignment()).unwrap());
        let s4 = s4_group();
        let sg = Named { group: &s4, names: &["t1", "t2", "t3"] };
        let mut short = g_map();
        short.insert("b".into(), Word::parse("t1 t2").unwrap());
        assert!(!check_iso_pair(&rg, &sg, &f_map(), &short).unwrap());
        let bad = Presentation::new(&["r"], &["x^2"]).unwrap();
        assert!(check_relators(&bad, &g, &rg.assignment()).is_err());
    }

    #[test]
    fn trivial_iso_pair() {
        let t = GroupTable::close(Perm::identity(1), &[Perm::identity(1)]);
        let a = Named { group: &t, names: &["x"] };
        let b = Named { group: &t, names: &["y"] };
        let f = word_map(&[("y", "x")]);
        let g = word_map(&[("x", "y")]);
        assert!(check_iso_pair(&a, &b, &f, &g).unwrap());
    }

    #[test]
    fn generator_order_does_not_matter() {
        let g = rotation_group();
        let mats: Vec<_> = g.generators.iter().map(|&i| g.elements[i].matrix().clone()).collect();
        let rev: Vec<_> = mats.iter().rev().cloned().collect();
        let h = enumerate_group(&rev).unwrap();
        let a: std::collections::HashSet<_> = g.elements.iter().collect();
        let b: std::collections::HashSet<_> = h.elements.iter().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn words_parse_and_invert() {
        let w = Word::parse("r^2 g b^-1").unwrap();
        assert_eq!(w.to_string(), "r^2 g b^-1");
        assert_eq!(w.inverse().to_string(), "b g^-1 r^-2");
        assert!(Word::parse("^2").is_err());
    }
}

