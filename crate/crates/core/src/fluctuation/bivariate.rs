use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::PATH_LIMIT;
use crate::rational::{self, ratio, Rational};

/// Finite law on integer pairs `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateIncrementSpec {
    name: String,
    atoms: BTreeMap<(i64, i64), Rational>,
    y_symmetric: bool,
}

impl BivariateIncrementSpec {
    pub fn new(name: impl Into<String>, atoms: impl IntoIterator<Item = ((i64, i64), Rational)>) -> Result<Self> {
        let mut map: BTreeMap<(i64, i64), Rational> = BTreeMap::new();
        for (k, p) in atoms {
            if p.is_negative() {
                return Err(Error::NegativeProbability { at: format!("{k:?}"), value: rational::format(&p) });
            }
            if !p.is_zero() {
                *map.entry(k).or_insert_with(Rational::zero) += p;
            }
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::MassDeficit { total: rational::format(&total) });
        }
        let y_symmetric = map.iter().all(|(&(x, y), p)| map.get(&(x, -y)) == Some(p));
        Ok(Self { name: name.into(), atoms: map, y_symmetric })
    }

    /// Parses `x,y=p;x,y=p;...`.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (xy, p) = part.split_once('=').ok_or_else(|| Error::Parse(format!("atom {part:?} is not x,y=p")))?;
            let (x, y) = xy.split_once(',').ok_or_else(|| Error::Parse(format!("atom {part:?} is not x,y=p")))?;
            let x: i64 = x.trim().parse().map_err(|_| Error::Parse(format!("bad x in {part:?}")))?;
            let y: i64 = y.trim().parse().map_err(|_| Error::Parse(format!("bad y in {part:?}")))?;
            atoms.push(((x, y), rational::parse(p)?));
        }
        Self::new(name, atoms)
    }

    /// `(1, 1)` and `(-1, -1)` with mass 1/2 each; not y-symmetric.
    pub fn correlated_coin() -> Self {
        Self::new("correlated-coin", [((1, 1), ratio(1, 2)), ((-1, -1), ratio(1, 2))]).expect("valid law")
    }

    /// `x = |y|` with `y` a lazy coin: `(0,0)` 1/2, `(1,±1)` 1/4 each.
    pub fn coupled_coin() -> Self {
        Self::new("coupled-coin", [((0, 0), ratio(1, 2)), ((1, 1), ratio(1, 4)), ((1, -1), ratio(1, 4))])
            .expect("valid law")
    }

    /// Two independent fair `±1` coins.
    pub fn independent_coins() -> Self {
        let q = ratio(1, 4);
        Self::new("independent-coins", [((1, 1), q.clone()), ((1, -1), q.clone()), ((-1, 1), q.clone()), ((-1, -1), q)])
            .expect("valid law")
    }

    /// Five equally likely atoms with an asymmetric `x` marginal.
    pub fn five_atom() -> Self {
        let p = ratio(1, 5);
        Self::new(
            "five-atom",
            [((-1, 0), p.clone()), ((0, 1), p.clone()), ((0, -1), p.clone()), ((3, 2), p.clone()), ((3, -2), p)],
        )
        .expect("valid law")
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "correlated-coin" => Ok(Self::correlated_coin()),
            "coupled-coin" => Ok(Self::coupled_coin()),
            "independent-coins" => Ok(Self::independent_coins()),
            "five-atom" => Ok(Self::five_atom()),
            _ => Err(Error::InvalidParameter(format!("unknown bivariate law {name:?}"))),
        }
    }

    pub const BUILTINS: [&'static str; 4] = ["correlated-coin", "coupled-coin", "independent-coins", "five-atom"];

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn atoms(&self) -> &BTreeMap<(i64, i64), Rational> {
        &self.atoms
    }

    /// `P(x, y) = P(x, -y)` for every atom.
    pub fn y_symmetric(&self) -> bool {
        self.y_symmetric
    }
}

/// The four half-plane measures at one reachable value `x` of `S_n^(1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfplaneRow {
    pub x: i64,
    /// `P(S_n^(1) = x, min_{i<=n} S_i^(2) >= 0)`.
    pub lhs1: Rational,
    /// `P(S_n^(1) = x) P(min_{i<=n} S_i^(2) > 0)`.
    pub rhs1: Rational,
    /// `P(S_n^(1) = x, min_{i<=n} S_i^(2) > 0)`.
    pub lhs2: Rational,
    /// `P(S_n^(1) = x) P(min_{i<=n} S_i^(2) >= 0)`.
    pub rhs2: Rational,
}

impl HalfplaneRow {
    pub fn indep1_holds(&self) -> bool {
        self.lhs1 >= self.rhs1
    }

    pub fn indep2_holds(&self) -> bool {
        self.lhs2 <= self.rhs2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Halfplane {
    pub n: usize,
    pub rows: Vec<HalfplaneRow>,
    /// `P(min_{i<=n} S_i^(2) >= 0)`.
    pub weak_min: Rational,
    /// `P(min_{i<=n} S_i^(2) > 0)`.
    pub strict_min: Rational,
}

impl Halfplane {
    pub fn indep1_holds(&self) -> bool {
        self.rows.iter().all(HalfplaneRow::indep1_holds)
    }

    pub fn indep2_holds(&self) -> bool {
        self.rows.iter().all(HalfplaneRow::indep2_holds)
    }
}

#[derive(Default, Clone)]
struct Counts {
    all: BigUint,
    weak: BigUint,
    strict: BigUint,
}

/// Half-plane measures by exhaustive enumeration of all `support^n` paths.
pub fn halfplane_measures(bspec: &BivariateIncrementSpec, n: usize) -> Result<Halfplane> {
    let k = bspec.atoms.len();
    if (k as f64).powi(n as i32) > PATH_LIMIT as f64 {
        return Err(Error::TooLarge(format!("{k}^{n} paths")));
    }
    let den = bspec.atoms.values().fold(BigInt::one(), |d, p| d.lcm(p.denom()));
    let steps: Vec<(i64, i64, BigUint)> = bspec
        .atoms
        .iter()
        .map(|(&(x, y), p)| (x, y, (p.numer() * (&den / p.denom())).to_biguint().expect("nonnegative")))
        .collect();

    let mut by_x: BTreeMap<i64, Counts> = BTreeMap::new();
    // (depth, x, y, min y so far, weight)
    let mut stack: Vec<(usize, i64, i64, i64, BigUint)> = vec![(0, 0, 0, i64::MAX, BigUint::one())];
    while let Some((depth, x, y, low, w)) = stack.pop() {
        if depth == n {
            let c = by_x.entry(x).or_default();
            c.all += &w;
            if low >= 0 {
                c.weak += &w;
            }
            if low > 0 {
                c.strict += &w;
            }
            continue;
        }
        for (dx, dy, p) in &steps {
            let y2 = y + dy;
            stack.push((depth + 1, x + dx, y2, low.min(y2), &w * p));
        }
    }

    let total = BigInt::from(num_traits::pow(den.to_biguint().expect("positive"), n));
    let frac = |c: &BigUint| Rational::new(BigInt::from(c.clone()), total.clone());
    let weak_min: Rational = by_x.values().map(|c| frac(&c.weak)).sum();
    let strict_min: Rational = by_x.values().map(|c| frac(&c.strict)).sum();
    let rows = by_x
        .iter()
        .map(|(&x, c)| {
            let px = frac(&c.all);
            HalfplaneRow {
                x,
                lhs1: frac(&c.weak),
                rhs1: &px * &strict_min,
                lhs2: frac(&c.strict),
                rhs2: &px * &weak_min,
            }
        })
        .collect();
    Ok(Halfplane { n, rows, weak_min, strict_min })
}

pub const HALFPLANE_HEADER: &str =
    "bspec_id,n,x,lhs1_num,lhs1_den,rhs1_num,rhs1_den,lhs2_num,lhs2_den,rhs2_num,rhs2_den";

pub fn halfplane_csv_row(bspec_id: &str, n: usize, row: &HalfplaneRow) -> String {
    let pair = |r: &Rational| format!("{},{}", r.numer(), r.denom());
    format!("{bspec_id},{n},{},{},{},{},{}", row.x, pair(&row.lhs1), pair(&row.rhs1), pair(&row.lhs2), pair(&row.rhs2))
}
