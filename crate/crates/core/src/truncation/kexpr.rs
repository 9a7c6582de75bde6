//! K-expressions: the grammar of per-cone functions `K_σ`.
//!
//! Grammar (whitespace-insensitive, no division operator):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary ('*' unary)*
//! unary   := '-' unary | primary
//! primary := NUMBER | 'x'INDEX | 'exp(' expr ')' | 'abs(' expr ')'
//!          | 'dot(x,[' NUMBER (',' NUMBER)* '])' | '(' expr ')'
//! NUMBER  := digits ['.' digits] ['/' digits]      (a rational literal)
//! ```
//!
//! Every expression is brought into a normal form `Σ c · m · exp(P)` where
//! `m` and `P` are polynomials in atoms: coordinates `x_i`, absolute values of
//! affine forms, and opaque subterms. Identical terms are merged, so
//! alternating sums cancel symbolically. The normal form yields the
//! metadata used by convergence certificates: the linear forms an
//! expression depends on (hence its invariance subspace) and exponential
//! decay along a cone.

use crate::error::{Error, Result};
use crate::geometry::hull::span_basis;
use crate::linalg::{is_positive_definite, Mat};
use crate::lp::{Cmp, Lp, LpResult};
use crate::rational::{dot, fmt_rat, is_zero_vec, parse_rat, to_f64, unit, vec_f64, Rat, Vector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

/// Expression tree as parsed (variables are 0-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rat),
    Var(usize),
    Dot(Vector),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Abs(Box<Expr>),
}

impl Expr {
    /// Floating-point evaluation.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => to_f64(c),
            Expr::Var(i) => x[*i],
            Expr::Dot(v) => v.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum(),
            Expr::Add(es) => es.iter().map(|e| e.eval(x)).sum(),
            Expr::Mul(es) => es.iter().map(|e| e.eval(x)).product(),
            Expr::Neg(e) => -e.eval(x),
            Expr::Exp(e) => e.eval(x).exp(),
            Expr::Abs(e) => e.eval(x).abs(),
        }
    }

    /// Substitute `x = x0 + Σ_j y_j basis_j`, giving an expression in `y`.
    pub fn substitute(&self, x0: &[Rat], basis: &[Vector]) -> Expr {
        let linear = |v: &[Rat]| -> Expr {
            let c: Rat = dot(v, x0);
            let d: Vector = basis.iter().map(|b| dot(v, b)).collect();
            Expr::Add(vec![Expr::Const(c), Expr::Dot(d)])
        };
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(i) => linear(&unit(x0.len(), *i)),
            Expr::Dot(v) => linear(v),
            Expr::Add(es) => Expr::Add(es.iter().map(|e| e.substitute(x0, basis)).collect()),
            Expr::Mul(es) => Expr::Mul(es.iter().map(|e| e.substitute(x0, basis)).collect()),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(x0, basis))),
            Expr::Exp(e) => Expr::Exp(Box::new(e.substitute(x0, basis))),
            Expr::Abs(e) => Expr::Abs(Box::new(e.substitute(x0, basis))),
        }
    }

    fn collect_forms(&self, n: usize, out: &mut Vec<Vector>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(i) => out.push(unit(n, *i)),
            Expr::Dot(v) => out.push(v.clone()),
            Expr::Add(es) | Expr::Mul(es) => es.iter().for_each(|e| e.collect_forms(n, out)),
            Expr::Neg(e) | Expr::Exp(e) | Expr::Abs(e) => e.collect_forms(n, out),
        }
    }
}

fn fmt_const(c: &Rat) -> String {
    if c.is_negative() {
        format!("(-{})", fmt_rat(&-c.clone()))
    } else {
        fmt_rat(c)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{}", fmt_const(c)),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Dot(v) => {
                let parts: Vec<String> = v.iter().map(|c| if c.is_negative() { format!("-{}", fmt_rat(&-c.clone())) } else { fmt_rat(c) }).collect();
                write!(f, "dot(x,[{}])", parts.join(","))
            }
            Expr::Add(es) => {
                if es.is_empty() {
                    return write!(f, "0");
                }
                let parts: Vec<String> = es.iter().map(|e| e.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
            Expr::Mul(es) => {
                if es.is_empty() {
                    return write!(f, "1");
                }
                let parts: Vec<String> = es
                    .iter()
                    .map(|e| match e {
                        Expr::Add(v) if v.len() > 1 => format!("({e})"),
                        _ => e.to_string(),
                    })
                    .collect();
                write!(f, "{}", parts.join(" * "))
            }
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
        }
    }
}

// ---------------------------------------------------------------- parsing

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Expr(format!("{msg} at column {}", self.pos + 1)))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(&format!("expected '{}'", c as char))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let k = kw.as_bytes();
        if self.s[self.pos..].starts_with(k) {
            let after = self.s.get(self.pos + k.len()).copied();
            if after.is_none_or(|c| !c.is_ascii_alphanumeric()) {
                self.pos += k.len();
                return true;
            }
        }
        false
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut fs = vec![self.unary()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            fs.push(self.unary()?);
        }
        Ok(if fs.len() == 1 { fs.pop().unwrap() } else { Expr::Mul(fs) })
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn number(&mut self) -> Result<Rat> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.pos < p.s.len() && p.s[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos > s
        };
        let int = digits(self);
        let mut frac = false;
        if self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = digits(self);
        }
        if !int && !frac {
            self.pos = start;
            return self.err("expected a number");
        }
        if self.s.get(self.pos) == Some(&b'/') {
            if frac {
                return self.err("a rational literal needs integer numerator");
            }
            self.pos += 1;
            if !digits(self) {
                return self.err("division is not supported; expected a denominator literal");
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        parse_rat(text).or_else(|m| self.err(&m))
    }

    fn signed_number(&mut self) -> Result<Rat> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.number()?);
        }
        if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        self.number()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(_) => {
                if self.keyword("exp") {
                    self.expect(b'(')?;
                    let e = self.expr()?;
                    self.expect(b')')?;
                    return Ok(Expr::Exp(Box::new(e)));
                }
                if self.keyword("abs") {
                    self.expect(b'(')?;
                    let e = self.expr()?;
                    self.expect(b')')?;
                    return Ok(Expr::Abs(Box::new(e)));
                }
                if self.keyword("dot") {
                    self.expect(b'(')?;
                    if !self.keyword("x") {
                        return self.err("expected 'x' as the first argument of dot");
                    }
                    self.expect(b',')?;
                    self.expect(b'[')?;
                    let mut v = vec![self.signed_number()?];
                    while self.peek() == Some(b',') {
                        self.pos += 1;
                        v.push(self.signed_number()?);
                    }
                    self.expect(b']')?;
                    self.expect(b')')?;
                    if v.len() != self.n {
                        return self.err(&format!("dot vector has {} entries, expected {}", v.len(), self.n));
                    }
                    return Ok(Expr::Dot(v));
                }
                if self.s[self.pos] == b'x' {
                    let start = self.pos;
                    self.pos += 1;
                    let ds = self.pos;
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == ds {
                        self.pos = start;
                        return self.err("expected a variable index after 'x'");
                    }
                    let i: usize = std::str::from_utf8(&self.s[ds..self.pos]).unwrap().parse().unwrap();
                    if i == 0 || i > self.n {
                        self.pos = start;
                        return self.err(&format!("variable x{i} out of range 1..{}", self.n));
                    }
                    return Ok(Expr::Var(i - 1));
                }
                if self.s[self.pos] == b'/' {
                    return self.err("division is not supported");
                }
                let word: String = self.s[self.pos..].iter().take_while(|c| c.is_ascii_alphanumeric()).map(|&c| c as char).collect();
                if word.is_empty() {
                    self.err(&format!("unexpected character '{}'", self.s[self.pos] as char))
                } else {
                    self.err(&format!("unsupported atom '{word}'"))
                }
            }
        }
    }
}

/// Parse an expression in `n` variables.
pub fn parse_expr(text: &str, n: usize) -> Result<Expr> {
    let mut p = Parser { s: text.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

// ------------------------------------------------------------ normal form

/// Affine form `coef · x + constant`, sign-normalized (first nonzero
/// coefficient positive) when used inside an absolute value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub coef: Vector,
    pub constant: Rat,
}

/// An atom of the normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Var(usize),
    Abs(Affine),
    Opaque(Expr),
}

/// Sorted product of atom powers.
pub type Mono = Vec<(Atom, u32)>;

fn mono_mul(a: &Mono, b: &Mono) -> Mono {
    let mut m: BTreeMap<Atom, u32> = BTreeMap::new();
    for (at, p) in a.iter().chain(b) {
        *m.entry(at.clone()).or_insert(0) += p;
    }
    m.into_iter().collect()
}

fn mono_degree(m: &Mono) -> u32 {
    m.iter().map(|(_, p)| p).sum()
}

/// Polynomial in atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    fn atom(a: Atom) -> Poly {
        let mut p = Poly::default();
        p.terms.insert(vec![(a, 1)], Rat::one());
        p
    }

    fn add_term(&mut self, m: Mono, c: Rat) {
        let e = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// `(coef, constant)` when the polynomial is affine in the coordinates.
    fn as_affine(&self, n: usize) -> Option<Affine> {
        let mut coef = vec![Rat::zero(); n];
        let mut constant = Rat::zero();
        for (m, c) in &self.terms {
            match m.as_slice() {
                [] => constant = c.clone(),
                [(Atom::Var(i), 1)] => coef[*i] = c.clone(),
                _ => return None,
            }
        }
        Some(Affine { coef, constant })
    }
}

/// `Σ coef · mono · exp(poly)`, keyed by `(mono, poly)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalForm {
    pub terms: BTreeMap<(Mono, Poly), Rat>,
}

impl NormalForm {
    fn constant(c: Rat) -> NormalForm {
        let mut f = NormalForm::default();
        f.add_term(Vec::new(), Poly::default(), c);
        f
    }

    fn from_poly(p: &Poly) -> NormalForm {
        let mut f = NormalForm::default();
        for (m, c) in &p.terms {
            f.add_term(m.clone(), Poly::default(), c.clone());
        }
        f
    }

    fn add_term(&mut self, m: Mono, e: Poly, c: Rat) {
        if c.is_zero() {
            return;
        }
        let key = (m, e);
        let v = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &NormalForm) -> NormalForm {
        let mut r = self.clone();
        for ((m, e), c) in &o.terms {
            r.add_term(m.clone(), e.clone(), c.clone());
        }
        r
    }

    pub fn scale(&self, s: &Rat) -> NormalForm {
        let mut r = NormalForm::default();
        for ((m, e), c) in &self.terms {
            r.add_term(m.clone(), e.clone(), c * s);
        }
        r
    }

    fn mul(&self, o: &NormalForm) -> NormalForm {
        let mut r = NormalForm::default();
        for ((m1, e1), c1) in &self.terms {
            for ((m2, e2), c2) in &o.terms {
                r.add_term(mono_mul(m1, m2), e1.add(e2), c1 * c2);
            }
        }
        r
    }

    /// The polynomial part, when no exponential factor occurs.
    fn as_poly(&self) -> Option<Poly> {
        let mut p = Poly::default();
        for ((m, e), c) in &self.terms {
            if !e.is_zero() {
                return None;
            }
            p.add_term(m.clone(), c.clone());
        }
        Some(p)
    }

    pub fn constant_value(&self) -> Option<Rat> {
        self.as_poly()?.as_constant()
    }

    /// Back to an expression tree (the simplified form).
    pub fn to_expr(&self) -> Expr {
        let poly_expr = |p: &Poly| -> Expr {
            let terms: Vec<Expr> = p.terms.iter().map(|(m, c)| mono_expr(c, m)).collect();
            if terms.len() == 1 {
                terms.into_iter().next().unwrap()
            } else {
                Expr::Add(terms)
            }
        };
        let mut terms = Vec::new();
        for ((m, e), c) in &self.terms {
            let base = mono_expr(c, m);
            if e.is_zero() {
                terms.push(base);
            } else {
                let ex = Expr::Exp(Box::new(poly_expr(e)));
                terms.push(match base {
                    Expr::Const(ref k) if k.is_one() => ex,
                    Expr::Mul(mut fs) => {
                        fs.push(ex);
                        Expr::Mul(fs)
                    }
                    b => Expr::Mul(vec![b, ex]),
                });
            }
        }
        match terms.len() {
            0 => Expr::Const(Rat::zero()),
            1 => terms.pop().unwrap(),
            _ => Expr::Add(terms),
        }
    }
}

fn atom_expr(a: &Atom) -> Expr {
    match a {
        Atom::Var(i) => Expr::Var(*i),
        Atom::Abs(af) => {
            let mut parts = vec![Expr::Dot(af.coef.clone())];
            if !af.constant.is_zero() {
                parts.push(Expr::Const(af.constant.clone()));
            }
            Expr::Abs(Box::new(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Add(parts) }))
        }
        Atom::Opaque(e) => e.clone(),
    }
}

fn mono_expr(c: &Rat, m: &Mono) -> Expr {
    let mut fs: Vec<Expr> = Vec::new();
    if !c.is_one() || m.is_empty() {
        fs.push(Expr::Const(c.clone()));
    }
    for (a, p) in m {
        for _ in 0..*p {
            fs.push(atom_expr(a));
        }
    }
    if fs.len() == 1 {
        fs.pop().unwrap()
    } else {
        Expr::Mul(fs)
    }
}

fn normalize(e: &Expr, n: usize) -> NormalForm {
    match e {
        Expr::Const(c) => NormalForm::constant(c.clone()),
        Expr::Var(i) => NormalForm::from_poly(&Poly::atom(Atom::Var(*i))),
        Expr::Dot(v) => {
            let mut p = Poly::default();
            for (i, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    p.add_term(vec![(Atom::Var(i), 1)], c.clone());
                }
            }
            NormalForm::from_poly(&p)
        }
        Expr::Add(es) => es.iter().fold(NormalForm::default(), |a, x| a.add(&normalize(x, n))),
        Expr::Mul(es) => es.iter().fold(NormalForm::constant(Rat::one()), |a, x| a.mul(&normalize(x, n))),
        Expr::Neg(x) => normalize(x, n).scale(&-Rat::one()),
        Expr::Exp(x) => {
            let inner = normalize(x, n);
            match inner.as_poly() {
                Some(p) => {
                    let mut f = NormalForm::default();
                    f.add_term(Vec::new(), p, Rat::one());
                    f
                }
                None => NormalForm::from_poly(&Poly::atom(Atom::Opaque(Expr::Exp(Box::new(inner.to_expr()))))),
            }
        }
        Expr::Abs(x) => {
            let inner = normalize(x, n);
            let opaque = || NormalForm::from_poly(&Poly::atom(Atom::Opaque(Expr::Abs(Box::new(inner.to_expr())))));
            let Some(p) = inner.as_poly() else { return opaque() };
            if let Some(c) = p.as_constant() {
                return NormalForm::constant(c.abs());
            }
            match p.as_affine(n) {
                Some(mut af) => {
                    if af.coef.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
                        af.coef.iter_mut().for_each(|c| *c = -c.clone());
                        af.constant = -af.constant;
                    }
                    NormalForm::from_poly(&Poly::atom(Atom::Abs(af)))
                }
                None => opaque(),
            }
        }
    }
}

// ------------------------------------------------------------- evaluation

#[derive(Clone, Debug)]
enum CAtom {
    Var(usize),
    Abs(Vec<f64>, f64),
    Opaque(Expr),
}

type CMono = Vec<(usize, i32)>;

#[derive(Clone, Debug, Default)]
struct Compiled {
    atoms: Vec<CAtom>,
    terms: Vec<(f64, CMono, Vec<(f64, CMono)>)>,
}

impl Compiled {
    fn new(nf: &NormalForm) -> Compiled {
        let mut index: BTreeMap<Atom, usize> = BTreeMap::new();
        let mut atoms = Vec::new();
        let cm = |m: &Mono, index: &mut BTreeMap<Atom, usize>, atoms: &mut Vec<CAtom>| -> CMono {
            m.iter()
                .map(|(a, p)| {
                    let i = *index.entry(a.clone()).or_insert_with(|| {
                        atoms.push(match a {
                            Atom::Var(i) => CAtom::Var(*i),
                            Atom::Abs(af) => CAtom::Abs(vec_f64(&af.coef), to_f64(&af.constant)),
                            Atom::Opaque(e) => CAtom::Opaque(e.clone()),
                        });
                        atoms.len() - 1
                    });
                    (i, *p as i32)
                })
                .collect()
        };
        let mut terms = Vec::new();
        for ((m, e), c) in &nf.terms {
            let mono = cm(m, &mut index, &mut atoms);
            let ex = e.terms.iter().map(|(em, ec)| (to_f64(ec), cm(em, &mut index, &mut atoms))).collect();
            terms.push((to_f64(c), mono, ex));
        }
        Compiled { atoms, terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut av = [0.0f64; 16];
        let mut heap: Vec<f64>;
        let vals: &mut [f64] = if self.atoms.len() <= 16 {
            &mut av[..self.atoms.len()]
        } else {
            heap = vec![0.0; self.atoms.len()];
            &mut heap
        };
        for (v, a) in vals.iter_mut().zip(&self.atoms) {
            *v = match a {
                CAtom::Var(i) => x[*i],
                CAtom::Abs(c, d) => (c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + d).abs(),
                CAtom::Opaque(e) => e.eval(x),
            };
        }
        let mono = |m: &CMono| m.iter().map(|&(i, p)| vals[i].powi(p)).product::<f64>();
        let mut s = 0.0;
        for (c, m, ex) in &self.terms {
            let mut t = c * mono(m);
            if !ex.is_empty() {
                t *= ex.iter().map(|(ec, em)| ec * mono(em)).sum::<f64>().exp();
            }
            s += t;
        }
        s
    }
}

// ----------------------------------------------------------- public type

/// Outcome of an invariance check along a subspace.
#[derive(Clone, Debug, PartialEq)]
pub enum Invariance {
    /// Every linear form of the expression annihilates the subspace.
    Structural,
    /// Not structurally evident, but random spot checks agree to full precision.
    Numerical,
    /// A witness `K(x + y) ≠ K(x)`.
    Violated { point: Vec<f64>, direction: Vec<f64> },
}

impl Invariance {
    pub fn holds(&self) -> bool {
        !matches!(self, Invariance::Violated { .. })
    }
}

/// Exponential decay along a polyhedral cone.
#[derive(Clone, Debug, PartialEq)]
pub enum Decay {
    /// `|K(y + s)| ≤ C(y) e^{−rate·‖s‖₁'}` on the cone, uniformly for bounded shifts,
    /// with the rate measured against the convex hull of the cone generators.
    Decays { rate: f64 },
    /// A direction of the cone along which some surviving term does not decay.
    Grows { direction: Vector },
    /// Outside the certifiable fragment of the grammar.
    Unverified(String),
}

/// A parsed, normalized K-expression on `ℝ^dim`.
#[derive(Clone, Debug)]
pub struct KExpr {
    pub dim: usize,
    pub expr: Expr,
    nf: NormalForm,
    compiled: Compiled,
}

impl PartialEq for KExpr {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.nf == other.nf
    }
}

impl fmt::Display for KExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

/// Parse a K-expression in `dim` variables.
pub fn parse_kexpr(text: &str, dim: usize) -> Result<KExpr> {
    Ok(KExpr::from_expr(parse_expr(text, dim)?, dim))
}

impl KExpr {
    pub fn from_expr(expr: Expr, dim: usize) -> KExpr {
        let nf = normalize(&expr, dim);
        KExpr::from_nf(expr, nf, dim)
    }

    fn from_nf(expr: Expr, nf: NormalForm, dim: usize) -> KExpr {
        let compiled = Compiled::new(&nf);
        KExpr { dim, expr, nf, compiled }
    }

    /// The simplified expression of a normal form.
    pub fn from_normal_form(nf: NormalForm, dim: usize) -> KExpr {
        KExpr::from_nf(nf.to_expr(), nf, dim)
    }

    pub fn constant(dim: usize, c: Rat) -> KExpr {
        KExpr::from_expr(Expr::Const(c), dim)
    }

    pub fn normal_form(&self) -> &NormalForm {
        &self.nf
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.compiled.eval(x)
    }

    pub fn is_zero(&self) -> bool {
        self.nf.is_zero()
    }

    /// The value when the expression is a rational constant.
    pub fn constant_value(&self) -> Option<Rat> {
        self.nf.constant_value()
    }

    /// Linear combination `Σ c_i K_i`, normalized (so identical terms cancel).
    pub fn linear_combination(dim: usize, parts: &[(Rat, &KExpr)]) -> KExpr {
        let nf = parts.iter().fold(NormalForm::default(), |a, (c, k)| a.add(&k.nf.scale(c)));
        KExpr::from_normal_form(nf, dim)
    }

    /// `K(x0 + Σ y_j basis_j)` as an expression in `y`.
    pub fn substitute(&self, x0: &[Rat], basis: &[Vector]) -> KExpr {
        let e = self.nf.to_expr().substitute(x0, basis);
        let nf = normalize(&e, basis.len());
        KExpr::from_normal_form(nf, basis.len())
    }

    /// Every linear form (covector) the expression depends on.
    pub fn linear_forms(&self) -> Vec<Vector> {
        let n = self.dim;
        let mut out: Vec<Vector> = Vec::new();
        let visit = |m: &Mono, out: &mut Vec<Vector>| {
            for (a, _) in m {
                match a {
                    Atom::Var(i) => out.push(unit(n, *i)),
                    Atom::Abs(af) => out.push(af.coef.clone()),
                    Atom::Opaque(e) => e.collect_forms(n, out),
                }
            }
        };
        for (m, e) in self.nf.terms.keys() {
            visit(m, &mut out);
            for em in e.terms.keys() {
                visit(em, &mut out);
            }
        }
        out.retain(|v| !is_zero_vec(v));
        out.sort();
        out.dedup();
        out
    }

    /// Basis of the common kernel of all linear forms: directions along
    /// which the expression is structurally constant.
    pub fn invariance_subspace(&self) -> Vec<Vector> {
        let forms = self.linear_forms();
        if forms.is_empty() {
            return (0..self.dim).map(|i| unit(self.dim, i)).collect();
        }
        crate::linalg::nullspace(&forms, self.dim)
    }

    /// Is the expression invariant under translation by `Span(dirs)`?
    pub fn invariance(&self, dirs: &[Vector]) -> Invariance {
        let forms = self.linear_forms();
        if dirs.iter().all(|d| forms.iter().all(|f| dot(f, d).is_zero())) {
            return Invariance::Structural;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x1a7a);
        let df: Vec<Vec<f64>> = dirs.iter().map(|d| vec_f64(d)).collect();
        for _ in 0..64 {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let mut y = vec![0.0; self.dim];
            for d in &df {
                let c: f64 = rng.gen_range(-3.0..3.0);
                for (yi, di) in y.iter_mut().zip(d) {
                    *yi += c * di;
                }
            }
            let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let (k0, k1) = (self.eval(&x), self.eval(&xy));
            if (k0 - k1).abs() > 1e-12 * (1.0 + k0.abs().max(k1.abs())) {
                return Invariance::Violated { point: x, direction: y };
            }
        }
        Invariance::Numerical
    }

    /// Kink hyperplanes `coef · x + constant = 0` of the absolute-value atoms.
    pub fn kinks(&self) -> Vec<Affine> {
        let mut out: Vec<Affine> = Vec::new();
        let mut visit = |m: &Mono| {
            for (a, _) in m {
                if let Atom::Abs(af) = a {
                    if !out.contains(af) {
                        out.push(af.clone());
                    }
                }
            }
        };
        for (m, e) in self.nf.terms.keys() {
            visit(m);
            for em in e.terms.keys() {
                visit(em);
            }
        }
        out
    }

    /// Whether every term is exponentially decreasing along the pointed cone
    /// generated by `gens`, uniformly under bounded shifts.
    pub fn decay(&self, gens: &[Vector]) -> Decay {
        let mut rate = f64::INFINITY;
        let mut unverified: Option<String> = None;
        for ((m, e), _) in &self.nf.terms {
            match term_decay(self.dim, m, e, gens) {
                Decay::Grows { direction } => return Decay::Grows { direction },
                Decay::Unverified(r) => {
                    unverified.get_or_insert(r);
                }
                Decay::Decays { rate: r } => rate = rate.min(r),
            }
        }
        match unverified {
            Some(r) => Decay::Unverified(r),
            None => Decay::Decays { rate },
        }
    }
}

fn term_decay(n: usize, mono: &Mono, exponent: &Poly, gens: &[Vector]) -> Decay {
    if mono.iter().any(|(a, _)| matches!(a, Atom::Opaque(_))) {
        return Decay::Unverified("opaque factor".into());
    }
    if gens.is_empty() {
        return Decay::Decays { rate: f64::INFINITY };
    }
    let mut lin = vec![Rat::zero(); n];
    let mut abs_terms: Vec<(Rat, Vector)> = Vec::new();
    let mut quad: Vec<(usize, usize, Rat)> = Vec::new();
    for (m, c) in &exponent.terms {
        match m.as_slice() {
            [] => {}
            [(Atom::Var(i), 1)] => lin[*i] += c,
            [(Atom::Abs(af), 1)] => abs_terms.push((c.clone(), af.coef.clone())),
            [(Atom::Var(i), 2)] => quad.push((*i, *i, c.clone())),
            [(Atom::Var(i), 1), (Atom::Var(j), 1)] => quad.push((*i, *j, c.clone())),
            _ if mono_degree(m) > 2 => return Decay::Unverified("exponent of degree above 2".into()),
            _ => return Decay::Unverified("exponent outside the affine/absolute-value/quadratic fragment".into()),
        }
    }
    if !quad.is_empty() {
        let basis = span_basis(gens);
        let k = basis.len();
        let q = |a: &Vector, b: &Vector| -> Rat {
            let mut s = Rat::zero();
            for (i, j, c) in &quad {
                let t = if i == j { &a[*i] * &b[*i] } else { (&a[*i] * &b[*j] + &a[*j] * &b[*i]) / Rat::from_integer(2.into()) };
                s += c * t;
            }
            s
        };
        let m: Mat = (0..k).map(|a| (0..k).map(|b| -q(&basis[a], &basis[b])).collect()).collect();
        if is_positive_definite(&m) {
            return Decay::Decays { rate: f64::INFINITY };
        }
        return Decay::Unverified("quadratic exponent is not negative definite along the cone".into());
    }
    // Piecewise-linear exponent φ(s) = L(s) + Σ c_k |ℓ_k(s)|: maximize over the
    // convex hull of the generators, one sign pattern of the ℓ_k at a time.
    let g = gens.len();
    let kk = abs_terms.len();
    let mut best: Option<(Rat, Vector)> = None;
    for pattern in 0u32..(1u32 << kk) {
        let mut lp = Lp::new(g);
        for i in 0..g {
            lp.add(unit(g, i), Cmp::Ge, Rat::zero());
        }
        lp.add(vec![Rat::one(); g], Cmp::Eq, Rat::one());
        let mut obj: Vector = gens.iter().map(|w| dot(&lin, w)).collect();
        for (k, (c, l)) in abs_terms.iter().enumerate() {
            let sgn = if pattern & (1 << k) != 0 { -Rat::one() } else { Rat::one() };
            let row: Vector = gens.iter().map(|w| &sgn * dot(l, w)).collect();
            for (o, r) in obj.iter_mut().zip(&row) {
                *o += c * r;
            }
            lp.add(row, Cmp::Ge, Rat::zero());
        }
        if let LpResult::Optimal { x, value } = lp.maximize(obj) {
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                best = Some((value, x));
            }
        }
    }
    let (value, lambda) = best.expect("the hull of the generators is nonempty");
    if !value.is_negative() {
        let mut d = vec![Rat::zero(); n];
        for (l, w) in lambda.iter().zip(gens) {
            d = crate::rational::axpy(&d, l, w);
        }
        return Decay::Grows { direction: crate::rational::primitive(&d) };
    }
    Decay::Decays { rate: -to_f64(&value) }
}
