//! Logic functions as polynomials of signed or boolean symbols.
//!
//! With signed symbols false is `-1` and true is `+1`; with boolean symbols
//! false is `0` and true is `1`. Every gate is a multi-affine polynomial, so
//! composing gates with the polynotope product keeps exact truth values while
//! the typed power rules keep the exponents in `{0, 1}`.

use nalgebra::DVector;
use rand::Rng;

use crate::error::{Error, Result};
use crate::polynotope::{Monomial, Polynotope};
use crate::symbols::{self, Flavor, SymbolId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    And,
    Or,
    Nand,
    Nor,
    Imp,
    Eqv,
    Xor,
    True,
    False,
}

impl GateKind {
    /// The eight non-constant gates.
    pub const OPERATORS: [GateKind; 8] = [
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Imp,
        GateKind::Eqv,
        GateKind::Xor,
        GateKind::Not,
    ];

    pub const ALL: [GateKind; 10] = [
        GateKind::Not,
        GateKind::And,
        GateKind::Or,
        GateKind::Nand,
        GateKind::Nor,
        GateKind::Imp,
        GateKind::Eqv,
        GateKind::Xor,
        GateKind::True,
        GateKind::False,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::True | GateKind::False => 0,
            GateKind::Not => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Not => "not",
            GateKind::And => "and",
            GateKind::Or => "or",
            GateKind::Nand => "nand",
            GateKind::Nor => "nor",
            GateKind::Imp => "imp",
            GateKind::Eqv => "eqv",
            GateKind::Xor => "xor",
            GateKind::True => "true",
            GateKind::False => "false",
        }
    }

    /// Reference truth function (the second operand is ignored when unused).
    pub fn truth(self, a: bool, b: bool) -> bool {
        match self {
            GateKind::Not => !a,
            GateKind::And => a && b,
            GateKind::Or => a || b,
            GateKind::Nand => !(a && b),
            GateKind::Nor => !(a || b),
            GateKind::Imp => !a || b,
            GateKind::Eqv => a == b,
            GateKind::Xor => a != b,
            GateKind::True => true,
            GateKind::False => false,
        }
    }

    /// Coefficients `(c0, ca, cb, cab)` of `c0 + ca a + cb b + cab ab`.
    fn coefficients(self, flavor: Flavor) -> [f64; 4] {
        match flavor {
            Flavor::Signed => match self {
                GateKind::Not => [0.0, -1.0, 0.0, 0.0],
                GateKind::And => [-0.5, 0.5, 0.5, 0.5],
                GateKind::Or => [0.5, 0.5, 0.5, -0.5],
                GateKind::Nand => [0.5, -0.5, -0.5, -0.5],
                GateKind::Nor => [-0.5, -0.5, -0.5, 0.5],
                GateKind::Imp => [0.5, -0.5, 0.5, 0.5],
                GateKind::Eqv => [0.0, 0.0, 0.0, 1.0],
                GateKind::Xor => [0.0, 0.0, 0.0, -1.0],
                GateKind::True => [1.0, 0.0, 0.0, 0.0],
                GateKind::False => [-1.0, 0.0, 0.0, 0.0],
            },
            Flavor::Boolean => match self {
                GateKind::Not => [1.0, -1.0, 0.0, 0.0],
                GateKind::And => [0.0, 0.0, 0.0, 1.0],
                GateKind::Or => [0.0, 1.0, 1.0, -1.0],
                GateKind::Nand => [1.0, 0.0, 0.0, -1.0],
                GateKind::Nor => [1.0, -1.0, -1.0, 1.0],
                GateKind::Imp => [1.0, -1.0, 0.0, 1.0],
                GateKind::Eqv => [1.0, -1.0, -1.0, 2.0],
                GateKind::Xor => [0.0, 1.0, 1.0, -2.0],
                GateKind::True => [1.0, 0.0, 0.0, 0.0],
                GateKind::False => [0.0, 0.0, 0.0, 0.0],
            },
        }
    }
}

/// Checks that `p` only uses symbols of the flavor's type and, if punctual,
/// holds domain values.
pub fn check_operand(p: &Polynotope, flavor: Flavor) -> Result<()> {
    let expected = flavor.symbol_type();
    if let Some(id) = p.ids().iter().find(|id| id.ty() != expected) {
        return Err(Error::FlavorMismatch {
            id: *id,
            expected,
            found: id.ty(),
        });
    }
    if p.is_punctual() {
        if let Some(v) = p
            .center()
            .iter()
            .find(|v| **v != flavor.truth() && **v != flavor.falsity())
        {
            return Err(Error::NotALogicValue(*v));
        }
    }
    Ok(())
}

/// Applies a gate polynomial element-wise. `b` is required for binary gates
/// and ignored otherwise.
pub fn gate(kind: GateKind, a: &Polynotope, b: Option<&Polynotope>, flavor: Flavor) -> Result<Polynotope> {
    check_operand(a, flavor)?;
    let [c0, ca, cb, cab] = kind.coefficients(flavor);
    let mut out = a.scale(ca).add_scalar(c0);
    if kind.arity() == 2 {
        let b = b.ok_or(Error::DimensionMismatch {
            op: "gate",
            expected: 2,
            found: 1,
        })?;
        check_operand(b, flavor)?;
        out = out.add(&b.scale(cb))?;
        out = out.add(&a.multiply(b)?.scale(cab))?;
    }
    Ok(out)
}

pub fn nand(a: &Polynotope, b: &Polynotope, flavor: Flavor) -> Result<Polynotope> {
    gate(GateKind::Nand, a, Some(b), flavor)
}

pub fn not(a: &Polynotope, flavor: Flavor) -> Result<Polynotope> {
    gate(GateKind::Not, a, None, flavor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Le,
    Ge,
    Lt,
    Gt,
}

/// Order relations: `≤` is implication, `a > b = ¬(a ≤ b)`, `a < b = b > a`.
pub fn compare(op: Comparison, a: &Polynotope, b: &Polynotope, flavor: Flavor) -> Result<Polynotope> {
    match op {
        Comparison::Le => gate(GateKind::Imp, a, Some(b), flavor),
        Comparison::Ge => gate(GateKind::Imp, b, Some(a), flavor),
        Comparison::Gt => not(&compare(Comparison::Le, a, b, flavor)?, flavor),
        Comparison::Lt => compare(Comparison::Gt, b, a, flavor),
    }
}

/// Truth table of a `p`-ary logic function.
///
/// Row `k` holds `f(x_1, …, x_p)` where `x_1` is the most significant bit of
/// `k` and a set bit means true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    arity: usize,
    outputs: Vec<bool>,
}

impl TruthTable {
    pub fn new(arity: usize, outputs: Vec<bool>) -> Result<Self> {
        if outputs.len() != 1 << arity {
            return Err(Error::DimensionMismatch {
                op: "truth_table",
                expected: 1 << arity,
                found: outputs.len(),
            });
        }
        Ok(TruthTable { arity, outputs })
    }

    pub fn from_fn(arity: usize, f: impl Fn(&[bool]) -> bool) -> Self {
        let outputs = (0..1usize << arity).map(|k| f(&Self::inputs_of(arity, k))).collect();
        TruthTable { arity, outputs }
    }

    pub fn random<R: Rng + ?Sized>(arity: usize, rng: &mut R) -> Self {
        let outputs = (0..1usize << arity).map(|_| rng.random_bool(0.5)).collect();
        TruthTable { arity, outputs }
    }

    /// Inputs of row `k`, `x_1` first.
    pub fn inputs_of(arity: usize, k: usize) -> Vec<bool> {
        (0..arity).map(|j| (k >> (arity - 1 - j)) & 1 == 1).collect()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn outputs(&self) -> &[bool] {
        &self.outputs
    }

    pub fn eval(&self, inputs: &[bool]) -> bool {
        let k = inputs.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        self.outputs[k]
    }
}

/// Multi-affine polynomial of `tt` over `p` fresh symbols of the flavor.
pub fn decompose(tt: &TruthTable, flavor: Flavor) -> Polynotope {
    let ids = symbols::fresh(tt.arity(), flavor.symbol_type());
    decompose_with(tt, flavor, &ids).expect("fresh symbols match the flavor")
}

/// Multi-affine polynomial of `tt` over the given symbols (`ids[0]` is `x_1`).
///
/// Peels `x_1` first: `f = A + x_1 H` with the average `A` and half-gap `H`
/// of the two cofactors (signed), or `f = G + x_1 U` with the false cofactor
/// `G` and unit gap `U` (boolean), then recurses on the cofactors.
pub fn decompose_with(tt: &TruthTable, flavor: Flavor, ids: &[SymbolId]) -> Result<Polynotope> {
    if ids.len() != tt.arity() {
        return Err(Error::DimensionMismatch {
            op: "decompose",
            expected: tt.arity(),
            found: ids.len(),
        });
    }
    if let Some(id) = ids.iter().find(|id| id.ty() != flavor.symbol_type()) {
        return Err(Error::FlavorMismatch {
            id: *id,
            expected: flavor.symbol_type(),
            found: id.ty(),
        });
    }
    let values: Vec<f64> = tt.outputs().iter().map(|&b| flavor.value(b)).collect();
    let coeffs = multiaffine(&values, flavor);
    let p = tt.arity();
    let terms = coeffs.iter().enumerate().skip(1).filter(|(_, c)| **c != 0.0).map(|(mask, c)| {
        let factors = (0..p).filter(|j| mask >> (p - 1 - j) & 1 == 1).map(|j| (ids[j], 1));
        (Monomial::from_factors(factors), DVector::from_element(1, *c))
    });
    Polynotope::from_terms(DVector::from_element(1, coeffs[0]), terms)
}

/// Coefficient of the monomial `Π_{bit j of mask set} x_j` for every mask,
/// using the same bit layout as the truth table.
fn multiaffine(values: &[f64], flavor: Flavor) -> Vec<f64> {
    if values.len() == 1 {
        return values.to_vec();
    }
    let half = values.len() / 2;
    let (lo, hi) = values.split_at(half);
    let (base, slope): (Vec<f64>, Vec<f64>) = match flavor {
        Flavor::Signed => lo.iter().zip(hi).map(|(l, h)| ((h + l) / 2.0, (h - l) / 2.0)).unzip(),
        Flavor::Boolean => lo.iter().zip(hi).map(|(l, h)| (*l, h - l)).unzip(),
    };
    let mut out = multiaffine(&base, flavor);
    out.extend(multiaffine(&slope, flavor));
    out
}

/// Nand-only synthesis of `tt` as a sum of minterms over the given operands.
pub fn synthesize_nand(tt: &TruthTable, flavor: Flavor, vars: &[Polynotope]) -> Result<Polynotope> {
    if vars.len() != tt.arity() || vars.is_empty() {
        return Err(Error::DimensionMismatch {
            op: "synthesize_nand",
            expected: tt.arity().max(1),
            found: vars.len(),
        });
    }
    let neg = |x: &Polynotope| nand(x, x, flavor);
    let and = |x: &Polynotope, y: &Polynotope| neg(&nand(x, y, flavor)?);
    let or = |x: &Polynotope, y: &Polynotope| nand(&neg(x)?, &neg(y)?, flavor);
    let mut acc: Option<Polynotope> = None;
    for (k, &out) in tt.outputs().iter().enumerate() {
        if !out {
            continue;
        }
        let inputs = TruthTable::inputs_of(tt.arity(), k);
        let mut term: Option<Polynotope> = None;
        for (v, &bit) in vars.iter().zip(&inputs) {
            let lit = if bit { v.clone() } else { neg(v)? };
            term = Some(match term {
                None => lit,
                Some(t) => and(&t, &lit)?,
            });
        }
        let term = term.expect("arity is positive");
        acc = Some(match acc {
            None => term,
            Some(a) => or(&a, &term)?,
        });
    }
    match acc {
        Some(a) => Ok(a),
        None => {
            let x = &vars[0];
            neg(&nand(x, &neg(x)?, flavor)?)
        }
    }
}

/// Half adder from five nand gates; returns `(sum, carry)`.
pub fn half_adder(a: &Polynotope, b: &Polynotope, flavor: Flavor) -> Result<(Polynotope, Polynotope)> {
    let t1 = nand(a, b, flavor)?;
    let t2 = nand(a, &t1, flavor)?;
    let t3 = nand(&t1, b, flavor)?;
    let s = nand(&t2, &t3, flavor)?;
    let c = nand(&t1, &t1, flavor)?;
    Ok((s, c))
}

/// One-bit full adder: two half adders and `c_out = ¬c1 ↑ ¬c2`.
pub fn full_adder(
    a: &Polynotope,
    b: &Polynotope,
    cin: &Polynotope,
    flavor: Flavor,
) -> Result<(Polynotope, Polynotope)> {
    let (r, c1) = half_adder(a, b, flavor)?;
    let (s, c2) = half_adder(&r, cin, flavor)?;
    let cout = nand(&nand(&c1, &c1, flavor)?, &nand(&c2, &c2, flavor)?, flavor)?;
    Ok((s, cout))
}

/// An `n`-bit ripple adder over fresh symbols.
#[derive(Debug, Clone)]
pub struct Adder {
    /// `[S_1; …; S_n; c_out]`, least significant bit first.
    pub output: Polynotope,
    pub a: Vec<SymbolId>,
    pub b: Vec<SymbolId>,
    pub carry_in: SymbolId,
}

impl Adder {
    /// Number of distinct monomials including the constant term.
    pub fn census(&self) -> usize {
        1 + self.output.monomial_count()
    }
}

/// Builds the `n`-bit adder from nand gates on `2n + 1` fresh symbols.
pub fn adder(n: usize, flavor: Flavor) -> Result<Adder> {
    if n == 0 {
        return Err(Error::Config("adder needs at least one bit".into()));
    }
    let ids = symbols::fresh(2 * n + 1, flavor.symbol_type());
    let (a, rest) = ids.split_at(n);
    let (b, cin) = rest.split_at(n);
    let mut carry = Polynotope::symbol(cin[0]);
    let mut rows = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (s, c) = full_adder(&Polynotope::symbol(a[i]), &Polynotope::symbol(b[i]), &carry, flavor)?;
        rows.push(s);
        carry = c;
    }
    rows.push(carry);
    Ok(Adder {
        output: Polynotope::stack(&rows),
        a: a.to_vec(),
        b: b.to_vec(),
        carry_in: cin[0],
    })
}
