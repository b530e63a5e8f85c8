//! Genus-2 curve models and their geometric automorphisms.
//!
//! Odd-characteristic curves are handled as binary sextic forms
//! F(X,Z) = sum f_i X^i Z^(6-i), with points (X:Y:Z) of weights (1,3,1).
//! An automorphism is a pair (M, e) acting by (X,Z) -> M(X,Z), Y -> eY,
//! and it preserves the curve iff F(M(X,Z)) = e^2 F(X,Z).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::ff::{Embedding, Fe, FieldCtx};
use crate::poly::{parse_polynomial, FactorShape, Polynomial};

/// Shape of the Weierstrass set as a Galois set.
pub type GaloisShape = FactorShape;

/// A genus-2 curve over a finite field.
#[derive(Clone, PartialEq, Eq)]
pub enum CurveModel {
    /// y^2 = f(x), f separable of degree 5 or 6, odd characteristic.
    OddChar { f: Polynomial },
    /// y^2 + y = a x^5 + b x^3 + c x + d in characteristic 2.
    Char2 { ctx: Arc<FieldCtx>, a: Fe, b: Fe, c: Fe, d: Fe },
}

impl fmt::Debug for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveModel::OddChar { f: poly } => write!(f, "y^2 = {poly}"),
            CurveModel::Char2 { ctx, a, b, c, d } => {
                let rhs = Polynomial::new(ctx.clone(), vec![*d, *c, Fe::ZERO, *b, Fe::ZERO, *a]);
                write!(f, "y^2 + y = {rhs}")
            }
        }
    }
}

impl CurveModel {
    pub fn odd(f: Polynomial) -> Result<CurveModel> {
        if f.ctx().p() == 2 {
            return Err(Error::WrongCharacteristic("y^2 = f(x) needs odd characteristic".into()));
        }
        if f.degree() != 5 && f.degree() != 6 || f.is_zero() {
            return Err(Error::InvalidCurve(format!("degree {} is not 5 or 6", f.deg())));
        }
        if !f.is_separable() {
            return Err(Error::NotSeparable);
        }
        Ok(CurveModel::OddChar { f })
    }

    pub fn char2(ctx: &Arc<FieldCtx>, a: Fe, b: Fe, c: Fe, d: Fe) -> Result<CurveModel> {
        if ctx.p() != 2 {
            return Err(Error::WrongCharacteristic("Artin-Schreier model needs p = 2".into()));
        }
        if a.is_zero() {
            return Err(Error::InvalidCurve("a must be nonzero".into()));
        }
        Ok(CurveModel::Char2 { ctx: ctx.clone(), a, b, c, d })
    }

    /// Parses "y^2 = x^5 - 1" or "y^2 + y = x^5 + x^3".
    pub fn parse(ctx: &Arc<FieldCtx>, s: &str) -> Result<CurveModel> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (lhs, rhs) = compact
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("missing '=' in {s}")))?;
        let f = parse_polynomial(ctx, rhs)?;
        match lhs {
            "y^2" => CurveModel::odd(f),
            "y^2+y" => {
                let allowed = [0usize, 1, 3, 5];
                if f.degree() != 5
                    || (0..=f.degree()).any(|i| !f.coeff(i).is_zero() && !allowed.contains(&i))
                {
                    return Err(Error::InvalidCurve(
                        "expected a*x^5 + b*x^3 + c*x + d".into(),
                    ));
                }
                CurveModel::char2(ctx, f.coeff(5), f.coeff(3), f.coeff(1), f.coeff(0))
            }
            _ => Err(Error::Parse(format!("unsupported left-hand side {lhs}"))),
        }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        match self {
            CurveModel::OddChar { f } => f.ctx(),
            CurveModel::Char2 { ctx, .. } => ctx,
        }
    }

    pub fn f(&self) -> Option<&Polynomial> {
        match self {
            CurveModel::OddChar { f } => Some(f),
            _ => None,
        }
    }

    pub fn is_deg5(&self) -> bool {
        matches!(self, CurveModel::OddChar { f } if f.degree() == 5)
    }

    /// Coefficients f_0..f_6 of the binary sextic form.
    pub fn form(&self) -> Result<[Fe; 7]> {
        let f = self.f().ok_or_else(|| Error::WrongCharacteristic("char 2".into()))?;
        let mut out = [Fe::ZERO; 7];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f.coeff(i);
        }
        Ok(out)
    }

    /// Galois structure of the six Weierstrass points.
    pub fn weierstrass_shape(&self) -> Result<GaloisShape> {
        let f = self.f().ok_or_else(|| {
            Error::WrongCharacteristic("Weierstrass shape is defined for odd p".into())
        })?;
        let s = f.factor_shape()?;
        Ok(if f.degree() == 5 { s.with_orbit(1) } else { s })
    }

    /// Number of k-rational Weierstrass points.
    pub fn rational_weierstrass_count(&self) -> Result<u32> {
        Ok(self.weierstrass_shape()?.count_of(1))
    }

    /// Quadratic twist: y^2 = t f(x) with t the first nonsquare, or d + d0
    /// in characteristic 2 with d0 the first element of absolute trace 1.
    pub fn hyperelliptic_twist(&self) -> CurveModel {
        match self {
            CurveModel::OddChar { f } => {
                let k = f.ctx();
                let t = k.first_nonsquare().expect("odd field has nonsquares");
                CurveModel::OddChar { f: f.scale(t) }
            }
            CurveModel::Char2 { ctx, a, b, c, d } => {
                let d0 = first_trace_one(ctx);
                CurveModel::Char2 { ctx: ctx.clone(), a: *a, b: *b, c: *c, d: ctx.add(*d, d0) }
            }
        }
    }

    /// A k-isomorphic degree-5 model, when one exists (a rational
    /// Weierstrass point is moved to infinity).
    pub fn to_deg5(&self) -> Option<CurveModel> {
        let f = self.f()?;
        if f.degree() == 5 {
            return Some(self.clone());
        }
        let k = f.ctx();
        let r = *f.roots().first()?;
        // (X, Z) -> (rX + Z, X)
        let form = self.form().ok()?;
        let g = compose_form(k, &form, &[r, k.one(), k.one(), Fe::ZERO]);
        Some(CurveModel::OddChar { f: Polynomial::new(k.clone(), g.to_vec()) })
    }

    /// Same curve with coefficients in an extension field.
    pub fn base_change(&self, emb: &Embedding) -> CurveModel {
        match self {
            CurveModel::OddChar { f } => CurveModel::OddChar { f: f.embed(emb) },
            CurveModel::Char2 { a, b, c, d, .. } => CurveModel::Char2 {
                ctx: emb.dst().clone(),
                a: emb.map(*a),
                b: emb.map(*b),
                c: emb.map(*c),
                d: emb.map(*d),
            },
        }
    }

    pub fn to_json(&self) -> CurveJson {
        match self {
            CurveModel::OddChar { f } => CurveJson::Odd {
                f: f.coeffs().iter().map(|&a| f.ctx().coeffs(a)).collect(),
            },
            CurveModel::Char2 { ctx, a, b, c, d } => CurveJson::Char2 {
                a: ctx.coeffs(*a),
                b: ctx.coeffs(*b),
                c: ctx.coeffs(*c),
                d: ctx.coeffs(*d),
            },
        }
    }

    pub fn from_json(ctx: &Arc<FieldCtx>, j: &CurveJson) -> Result<CurveModel> {
        let el = |v: &Vec<u64>| ctx.from_coeffs(v);
        match j {
            CurveJson::Odd { f } => {
                let c: Result<Vec<Fe>> = f.iter().map(el).collect();
                CurveModel::odd(Polynomial::new(ctx.clone(), c?))
            }
            CurveJson::Char2 { a, b, c, d } => {
                CurveModel::char2(ctx, el(a)?, el(b)?, el(c)?, el(d)?)
            }
        }
    }
}

/// JSON form of a curve; coefficients as coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "char")]
pub enum CurveJson {
    #[serde(rename = "odd")]
    Odd { f: Vec<Vec<u64>> },
    #[serde(rename = "2")]
    Char2 { a: Vec<u64>, b: Vec<u64>, c: Vec<u64>, d: Vec<u64> },
}

/// First element (in enumeration order) with absolute trace 1.
pub fn first_trace_one(k: &Arc<FieldCtx>) -> Fe {
    k.elements().find(|&x| k.abs_trace(x) == 1).expect("trace is surjective")
}

// ---------------------------------------------------------------------------
// Binary forms and Moebius maps

/// Projective point (X:Z) normalized to (x:1) or (1:0).
pub type Point1 = [Fe; 2];

fn normalize_point(k: &FieldCtx, pt: [Fe; 2]) -> Point1 {
    if pt[1].is_zero() {
        [k.one(), Fe::ZERO]
    } else {
        [k.div(pt[0], pt[1]).unwrap(), k.one()]
    }
}

/// M * (X, Z) without normalization.
fn mobius_raw(k: &FieldCtx, m: &[Fe; 4], pt: &[Fe; 2]) -> [Fe; 2] {
    [
        k.add(k.mul(m[0], pt[0]), k.mul(m[1], pt[1])),
        k.add(k.mul(m[2], pt[0]), k.mul(m[3], pt[1])),
    ]
}

pub fn apply_mobius(k: &FieldCtx, m: &[Fe; 4], pt: &Point1) -> Point1 {
    normalize_point(k, mobius_raw(k, m, pt))
}

fn mat_mul(k: &FieldCtx, a: &[Fe; 4], b: &[Fe; 4]) -> [Fe; 4] {
    [
        k.add(k.mul(a[0], b[0]), k.mul(a[1], b[2])),
        k.add(k.mul(a[0], b[1]), k.mul(a[1], b[3])),
        k.add(k.mul(a[2], b[0]), k.mul(a[3], b[2])),
        k.add(k.mul(a[2], b[1]), k.mul(a[3], b[3])),
    ]
}

fn mat_det(k: &FieldCtx, a: &[Fe; 4]) -> Fe {
    k.sub(k.mul(a[0], a[3]), k.mul(a[1], a[2]))
}

fn mat_adj(k: &FieldCtx, a: &[Fe; 4]) -> [Fe; 4] {
    [a[3], k.neg(a[1]), k.neg(a[2]), a[0]]
}

/// Scale so that the first nonzero entry is 1; returns (matrix, scale c)
/// with the input equal to c times the result.
fn mat_normalize(k: &FieldCtx, a: &[Fe; 4]) -> ([Fe; 4], Fe) {
    let c = *a.iter().find(|x| !x.is_zero()).expect("nonzero matrix");
    let ci = k.inv(c).unwrap();
    ([k.mul(a[0], ci), k.mul(a[1], ci), k.mul(a[2], ci), k.mul(a[3], ci)], c)
}

/// F(M(X,Z)) for a sextic form F.
pub fn compose_form(k: &FieldCtx, form: &[Fe; 7], m: &[Fe; 4]) -> [Fe; 7] {
    // powers of A = alpha x + beta and B = gamma x + delta as coefficient arrays
    let lin_pows = |a: Fe, b: Fe| -> Vec<[Fe; 7]> {
        let mut out = vec![[Fe::ZERO; 7]; 7];
        out[0][0] = k.one();
        for i in 1..7 {
            let prev = out[i - 1];
            let mut cur = [Fe::ZERO; 7];
            for j in 0..7 {
                if prev[j].is_zero() {
                    continue;
                }
                cur[j] = k.add(cur[j], k.mul(prev[j], b));
                if j + 1 < 7 {
                    cur[j + 1] = k.add(cur[j + 1], k.mul(prev[j], a));
                }
            }
            out[i] = cur;
        }
        out
    };
    let pa = lin_pows(m[0], m[1]);
    let pb = lin_pows(m[2], m[3]);
    let mut out = [Fe::ZERO; 7];
    for (i, &fi) in form.iter().enumerate() {
        if fi.is_zero() {
            continue;
        }
        let a = &pa[i];
        let b = &pb[6 - i];
        for s in 0..7 {
            if a[s].is_zero() {
                continue;
            }
            let coef = k.mul(fi, a[s]);
            for t in 0..7 - s {
                if b[t].is_zero() {
                    continue;
                }
                out[s + t] = k.add(out[s + t], k.mul(coef, b[t]));
            }
        }
    }
    out
}

/// lambda with G = lambda * F, if the forms are proportional.
fn proportionality(k: &FieldCtx, g: &[Fe; 7], f: &[Fe; 7]) -> Option<Fe> {
    let j = f.iter().position(|x| !x.is_zero())?;
    let lambda = k.div(g[j], f[j]).ok()?;
    (0..7).all(|i| k.mul(lambda, f[i]) == g[i]).then_some(lambda)
}

/// Matrix sending (1:0), (0:1), (1:1) to three given points.
fn frame(k: &FieldCtx, p0: &Point1, p1: &Point1, p2: &Point1) -> Option<[Fe; 4]> {
    // solve c0 p0 + c1 p1 = p2
    let m = [p0[0], p1[0], p0[1], p1[1]];
    let det = mat_det(k, &m);
    let di = k.inv(det)?;
    let adj = mat_adj(k, &m);
    let c0 = k.mul(di, k.add(k.mul(adj[0], p2[0]), k.mul(adj[1], p2[1])));
    let c1 = k.mul(di, k.add(k.mul(adj[2], p2[0]), k.mul(adj[3], p2[1])));
    if c0.is_zero() || c1.is_zero() {
        return None;
    }
    Some([k.mul(c0, p0[0]), k.mul(c1, p1[0]), k.mul(c0, p0[1]), k.mul(c1, p1[1])])
}

/// Moebius maps (as matrices) sending the set `src` onto the set `dst`,
/// both given as six normalized points.
fn set_maps(k: &FieldCtx, src: &[Point1], dst: &[Point1]) -> Vec<[Fe; 4]> {
    let mut sorted_dst = dst.to_vec();
    sorted_dst.sort();
    let a = frame(k, &src[0], &src[1], &src[2]).expect("distinct points");
    let a_inv = mat_adj(k, &a);
    let mut out = Vec::new();
    let n = dst.len();
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for l in 0..n {
                if l == i || l == j {
                    continue;
                }
                let Some(b) = frame(k, &dst[i], &dst[j], &dst[l]) else { continue };
                let m = mat_mul(k, &b, &a_inv);
                let ok = src
                    .iter()
                    .all(|pt| sorted_dst.binary_search(&apply_mobius(k, &m, pt)).is_ok());
                if ok {
                    out.push(mat_normalize(k, &m).0);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------

/// A geometric automorphism (M, e), normalized so that the first nonzero
/// entry of M is 1. Coordinates live in the big field of a [`Geometry`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Automorphism {
    pub m: [Fe; 4],
    pub e: Fe,
}

/// A geometric isomorphism between two curves: F'(B(X,Z)) = lambda F(X,Z).
#[derive(Clone, Copy, Debug)]
pub struct Isomorphism {
    pub m: [Fe; 4],
    pub lambda: Fe,
}

/// Relation class of an automorphism v with respect to the powers of v
/// and the hyperelliptic involution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Identity,
    Iota,
    /// v^m = 1 with m minimal among powers landing in {1, iota}.
    PowOne(u32),
    /// v^m = iota with m minimal.
    PowIota(u32),
}

struct GroupTables {
    mul: Vec<u32>,
    inv: Vec<u32>,
    sig: Vec<u32>,
    red: Vec<u32>,
    red_count: usize,
}

/// The curve over an explicit extension K of its field of definition k,
/// large enough that all Weierstrass points and automorphisms are defined.
pub struct Geometry {
    curve: CurveModel,
    k: Arc<FieldCtx>,
    big: Arc<FieldCtx>,
    emb: Arc<Embedding>,
    rel_degree: usize,
    form: [Fe; 7],
    w: Vec<Point1>,
    group: Vec<Automorphism>,
    index: HashMap<Automorphism, usize>,
    tables: OnceLock<GroupTables>,
}

impl Geometry {
    /// Lcm of the orbit lengths of the Weierstrass points.
    pub fn splitting_degree(curve: &CurveModel) -> Result<usize> {
        let shape = curve.weierstrass_shape()?;
        Ok(shape.0.iter().fold(1usize, |acc, &(d, _)| arith::lcm_u64(acc as u64, d as u64) as usize))
    }

    /// Geometry over k_(2L), L the splitting degree.
    pub fn new(curve: &CurveModel) -> Result<Geometry> {
        let l = Self::splitting_degree(curve)?;
        Self::with_degree(curve, 2 * l)
    }

    /// Geometry over k_d; d must be a multiple of twice the splitting degree.
    pub fn with_degree(curve: &CurveModel, d: usize) -> Result<Geometry> {
        let l = Self::splitting_degree(curve)?;
        if !d.is_multiple_of(2 * l) {
            return Err(Error::DegreeMismatch(format!(
                "degree {d} is not a multiple of {}",
                2 * l
            )));
        }
        let k = curve.ctx().clone();
        let (big, emb) = k
            .extension(d)
            .map_err(|_| Error::SearchBudgetExceeded(format!("splitting field k_{d} too large")))?;
        let kf = curve.form()?;
        let mut form = [Fe::ZERO; 7];
        for i in 0..7 {
            form[i] = emb.map(kf[i]);
        }
        let fpoly = Polynomial::new(big.clone(), form.to_vec());
        let mut w = fpoly.projective_roots(6);
        w.sort();
        if w.len() != 6 {
            return Err(Error::InvalidCurve("Weierstrass points not split".into()));
        }
        let mut geo = Geometry {
            curve: curve.clone(),
            k,
            big,
            emb,
            rel_degree: d,
            form,
            w,
            group: Vec::new(),
            index: HashMap::new(),
            tables: OnceLock::new(),
        };
        let mut group = Vec::new();
        for m in set_maps(&geo.big, &geo.w, &geo.w) {
            let g = compose_form(&geo.big, &geo.form, &m);
            let lambda = proportionality(&geo.big, &g, &geo.form).ok_or(Error::NotAutomorphism)?;
            let e = geo
                .big
                .sqrt(lambda)
                .ok_or_else(|| Error::SearchBudgetExceeded("y-scaling not in field".into()))?;
            group.push(Automorphism { m, e });
            group.push(Automorphism { m, e: geo.big.neg(e) });
        }
        group.sort();
        group.dedup();
        geo.index = group.iter().enumerate().map(|(i, a)| (*a, i)).collect();
        geo.group = group;
        Ok(geo)
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }
    pub fn base(&self) -> &Arc<FieldCtx> {
        &self.k
    }
    pub fn big(&self) -> &Arc<FieldCtx> {
        &self.big
    }
    pub fn embedding(&self) -> &Arc<Embedding> {
        &self.emb
    }
    /// [K : k].
    pub fn relative_degree(&self) -> usize {
        self.rel_degree
    }
    pub fn weierstrass_points(&self) -> &[Point1] {
        &self.w
    }
    pub fn form(&self) -> &[Fe; 7] {
        &self.form
    }
    pub fn group(&self) -> &[Automorphism] {
        &self.group
    }
    pub fn order(&self) -> usize {
        self.group.len()
    }

    pub fn identity(&self) -> Automorphism {
        let k = &self.big;
        Automorphism { m: [k.one(), Fe::ZERO, Fe::ZERO, k.one()], e: k.one() }
    }

    pub fn iota(&self) -> Automorphism {
        let k = &self.big;
        Automorphism { m: [k.one(), Fe::ZERO, Fe::ZERO, k.one()], e: k.neg(k.one()) }
    }

    fn normalize(&self, m: &[Fe; 4], e: Fe) -> Automorphism {
        let k = &self.big;
        let (m, c) = mat_normalize(k, m);
        let c3 = k.mul(k.mul(c, c), c);
        Automorphism { m, e: k.div(e, c3).unwrap() }
    }

    /// Automorphism from a matrix and y-scaling given over K.
    pub fn make(&self, m: [Fe; 4], e: Fe) -> Result<Automorphism> {
        if mat_det(&self.big, &m).is_zero() {
            return Err(Error::NotAutomorphism);
        }
        let a = self.normalize(&m, e);
        if self.index.contains_key(&a) {
            Ok(a)
        } else {
            Err(Error::NotAutomorphism)
        }
    }

    /// Checks F(M(X,Z)) = e^2 F(X,Z) directly.
    pub fn is_automorphism(&self, a: &Automorphism) -> bool {
        let k = &self.big;
        let g = compose_form(k, &self.form, &a.m);
        proportionality(k, &g, &self.form) == Some(k.mul(a.e, a.e))
    }

    pub fn contains(&self, a: &Automorphism) -> bool {
        self.index.contains_key(a)
    }

    pub fn compose(&self, a: &Automorphism, b: &Automorphism) -> Automorphism {
        let k = &self.big;
        self.normalize(&mat_mul(k, &a.m, &b.m), k.mul(a.e, b.e))
    }

    pub fn inverse(&self, a: &Automorphism) -> Automorphism {
        let k = &self.big;
        // adj(M) = det(M) M^-1, so e^-1 is rescaled by det^3
        let det = mat_det(k, &a.m);
        let d3 = k.mul(k.mul(det, det), det);
        self.normalize(&mat_adj(k, &a.m), k.mul(k.inv(a.e).unwrap(), d3))
    }

    /// Frobenius of k applied entrywise.
    pub fn sigma(&self, a: &Automorphism) -> Automorphism {
        let k = &self.big;
        let nk = self.k.n();
        Automorphism {
            m: [
                k.frob_pow(a.m[0], nk),
                k.frob_pow(a.m[1], nk),
                k.frob_pow(a.m[2], nk),
                k.frob_pow(a.m[3], nk),
            ],
            e: k.frob_pow(a.e, nk),
        }
    }

    pub fn power(&self, a: &Automorphism, n: u32) -> Automorphism {
        let mut r = self.identity();
        for _ in 0..n {
            r = self.compose(&r, a);
        }
        r
    }

    pub fn element_order(&self, a: &Automorphism) -> u32 {
        let id = self.identity();
        let mut x = *a;
        let mut n = 1;
        while x != id {
            x = self.compose(&x, a);
            n += 1;
        }
        n
    }

    pub fn relation(&self, a: &Automorphism) -> Relation {
        let id = self.identity();
        let iota = self.iota();
        if *a == id {
            return Relation::Identity;
        }
        if *a == iota {
            return Relation::Iota;
        }
        let mut x = *a;
        let mut m = 1;
        loop {
            x = self.compose(&x, a);
            m += 1;
            if x == id {
                return Relation::PowOne(m);
            }
            if x == iota {
                return Relation::PowIota(m);
            }
        }
    }

    /// Moebius part, normalized.
    pub fn reduced(&self, a: &Automorphism) -> [Fe; 4] {
        a.m
    }

    fn idx(&self, a: &Automorphism) -> Result<usize> {
        self.index.get(a).copied().ok_or(Error::NotAutomorphism)
    }

    fn tables(&self) -> &GroupTables {
        self.tables.get_or_init(|| {
            let n = self.group.len();
            let mut mul = vec![0u32; n * n];
            for i in 0..n {
                for j in 0..n {
                    let c = self.compose(&self.group[i], &self.group[j]);
                    mul[i * n + j] = self.index[&c] as u32;
                }
            }
            let id = self.index[&self.identity()];
            let inv = (0..n)
                .map(|i| (0..n).find(|&j| mul[i * n + j] as usize == id).unwrap() as u32)
                .collect();
            let sig = self.group.iter().map(|a| self.index[&self.sigma(a)] as u32).collect();
            let mut red_ids: HashMap<[Fe; 4], u32> = HashMap::new();
            let red = self
                .group
                .iter()
                .map(|a| {
                    let next = red_ids.len() as u32;
                    *red_ids.entry(a.m).or_insert(next)
                })
                .collect();
            GroupTables { mul, inv, sig, red, red_count: red_ids.len() }
        })
    }

    /// Indices u with u v = v u^sigma.
    fn centralizer_idx(&self, v: usize) -> Vec<usize> {
        let t = self.tables();
        let n = self.group.len();
        (0..n)
            .filter(|&u| t.mul[u * n + v] == t.mul[v * n + t.sig[u] as usize])
            .collect()
    }

    /// The k-automorphisms of the twist C_v, transported back to C.
    pub fn twisted_centralizer(&self, v: &Automorphism) -> Result<Vec<Automorphism>> {
        let vi = self.idx(v)?;
        Ok(self.centralizer_idx(vi).into_iter().map(|i| self.group[i]).collect())
    }

    /// |Aut(C_v)|.
    pub fn twist_aut_count(&self, v: &Automorphism) -> Result<usize> {
        let vi = self.idx(v)?;
        Ok(self.centralizer_idx(vi).len())
    }

    /// |Aut'(C_v)|: reduced maps u' with u' v' = v' u'^sigma in PGL2.
    pub fn reduced_aut_count(&self, v: &Automorphism) -> Result<usize> {
        let vi = self.idx(v)?;
        let t = self.tables();
        let n = self.group.len();
        let mut ok = vec![false; t.red_count];
        for u in 0..n {
            let lhs = t.red[t.mul[u * n + vi] as usize];
            let rhs = t.red[t.mul[vi * n + t.sig[u] as usize] as usize];
            if lhs == rhs {
                ok[t.red[u] as usize] = true;
            }
        }
        Ok(ok.iter().filter(|&&b| b).count())
    }

    pub fn is_self_dual(&self, v: &Automorphism) -> Result<bool> {
        Ok(self.reduced_aut_count(v)? == self.twist_aut_count(v)?)
    }

    /// |Aut(C)| and |Aut'(C)| over k.
    pub fn rational_counts(&self) -> (usize, usize) {
        let id = self.identity();
        (
            self.twist_aut_count(&id).unwrap(),
            self.reduced_aut_count(&id).unwrap(),
        )
    }

    fn sigma_point(&self, pt: &Point1) -> Point1 {
        let nk = self.k.n();
        [self.big.frob_pow(pt[0], nk), self.big.frob_pow(pt[1], nk)]
    }

    /// Galois shape of W for the twist C_v: cycle type of P -> v(P^sigma).
    pub fn twist_orbit_structure(&self, v: &Automorphism) -> Result<GaloisShape> {
        self.idx(v)?;
        let k = &self.big;
        let perm: Vec<usize> = self
            .w
            .iter()
            .map(|pt| {
                let image = apply_mobius(k, &v.m, &self.sigma_point(pt));
                self.w.binary_search(&image).expect("W is stable")
            })
            .collect();
        let mut seen = [false; 6];
        let mut degs = Vec::new();
        for s in 0..6 {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = perm[i];
                len += 1;
            }
            degs.push(len as u32);
        }
        Ok(FactorShape::from_degrees(&degs))
    }

    /// Number of points P of C over the algebraic closure with v(P^sigma) = P
    /// that are fixed by some nontrivial u with u v = v u^sigma.
    pub fn fixed_rational_count(&self, v: &Automorphism) -> Result<usize> {
        let vi = self.idx(v)?;
        let id = self.identity();
        let iota = self.iota();
        let zv: Vec<Automorphism> = self
            .centralizer_idx(vi)
            .into_iter()
            .map(|i| self.group[i])
            .filter(|u| *u != id)
            .collect();
        // fixed points of non-scalar Moebius maps may need a quadratic extension
        let k = &self.big;
        // for v = 1 the relevant points are k-rational, hence already in K
        let needs_ext = *v != id && zv.iter().any(|u| {
            if *u == iota {
                return false;
            }
            let [a, b, c, d] = u.m;
            let disc = k.add(k.square(k.sub(d, a)), k.scale(k.mul(b, c), 4));
            !c.is_zero() && !k.is_square(disc)
        });
        let (fld, lift): (Arc<FieldCtx>, Option<Arc<Embedding>>) = if needs_ext {
            let (f2, e2) = k
                .extension(2)
                .map_err(|_| Error::SearchBudgetExceeded("quadratic extension too large".into()))?;
            (f2, Some(e2))
        } else {
            (k.clone(), None)
        };
        let up = |a: Fe| match &lift {
            Some(e) => e.map(a),
            None => a,
        };
        let upm = |m: &[Fe; 4]| [up(m[0]), up(m[1]), up(m[2]), up(m[3])];
        let form: Vec<Fe> = self.form.iter().map(|&a| up(a)).collect();
        let fpoly = Polynomial::new(fld.clone(), form);
        let eval_form = |pt: &Point1| -> Fe {
            if pt[1].is_zero() {
                fpoly.coeff(6)
            } else {
                fpoly.eval(pt[0])
            }
        };
        let nk = self.k.n();
        let q = self.k.q();
        let vm = upm(&v.m);
        let ve = up(v.e);
        // eigenvalue of M at a fixed point (x:1) or (1:0)
        let eigen = |m: &[Fe; 4], pt: &Point1| -> Fe {
            if pt[1].is_zero() {
                m[0]
            } else {
                fld.add(fld.mul(m[2], pt[0]), m[3])
            }
        };
        let twisted_ok = |pt: &Point1| -> bool {
            let s = [fld.frob_pow(pt[0], nk), fld.frob_pow(pt[1], nk)];
            let raw = mobius_raw(&fld, &vm, &s);
            if normalize_point(&fld, raw) != *pt {
                return false;
            }
            let fx = eval_form(pt);
            if fx.is_zero() {
                return true;
            }
            let mu = if pt[1].is_zero() { raw[0] } else { raw[1] };
            let mu3 = fld.mul(fld.mul(mu, mu), mu);
            fld.mul(ve, fld.pow(fx, (q - 1) / 2)) == mu3
        };
        let mut found: Vec<(Point1, usize)> = Vec::new();
        let mut push = |pt: Point1, weight: usize| {
            if !found.iter().any(|(p, _)| *p == pt) {
                found.push((pt, weight));
            }
        };
        for u in &zv {
            let um = upm(&u.m);
            let ue = up(u.e);
            let candidates: Vec<Point1> = if *u == iota {
                self.w.iter().map(|p| [up(p[0]), up(p[1])]).collect()
            } else {
                mobius_fixed_points(&fld, &um)
            };
            for pt in candidates {
                let fx = eval_form(&pt);
                let weight = if fx.is_zero() { 1 } else { 2 };
                if !fx.is_zero() {
                    let lam = eigen(&um, &pt);
                    let lam3 = fld.mul(fld.mul(lam, lam), lam);
                    if ue != lam3 {
                        continue;
                    }
                }
                if twisted_ok(&pt) {
                    push(pt, weight);
                }
            }
        }
        Ok(found.iter().map(|(_, w)| w).sum())
    }

    /// H^1 classes: elements related by v ~ w^-1 v w^sigma share a class id.
    pub fn h1_classes(&self) -> Vec<usize> {
        let t = self.tables();
        let n = self.group.len();
        let mut class = vec![usize::MAX; n];
        let mut next = 0;
        for v in 0..n {
            if class[v] != usize::MAX {
                continue;
            }
            for w in 0..n {
                let wi = t.inv[w] as usize;
                let x = t.mul[t.mul[wi * n + v] as usize * n + t.sig[w] as usize] as usize;
                class[x] = next;
            }
            next += 1;
        }
        class
    }

    pub fn class_count(&self) -> usize {
        self.h1_classes().iter().max().map_or(0, |m| m + 1)
    }

    pub fn class_of(&self, v: &Automorphism) -> Result<usize> {
        let i = self.idx(v)?;
        Ok(self.h1_classes()[i])
    }

    /// First isomorphism (in enumeration order) from this curve to `other`,
    /// both viewed over the same big field.
    pub fn isomorphism_to(&self, other: &Geometry) -> Result<Option<Isomorphism>> {
        if *self.big != *other.big {
            return Err(Error::ContextMismatch);
        }
        let k = &self.big;
        for m in set_maps(k, &self.w, &other.w) {
            let g = compose_form(k, &other.form, &m);
            if let Some(lambda) = proportionality(k, &g, &self.form) {
                return Ok(Some(Isomorphism { m, lambda }));
            }
        }
        Ok(None)
    }

    /// The cocycle v = f^-1 f^sigma of an isomorphism f to a twist.
    pub fn cocycle_of(&self, f: &Isomorphism) -> Result<Automorphism> {
        let k = &self.big;
        let nk = self.k.n();
        let det = mat_det(k, &f.m);
        let di = k.inv(det).ok_or(Error::NotAutomorphism)?;
        let adj = mat_adj(k, &f.m);
        let binv = [k.mul(adj[0], di), k.mul(adj[1], di), k.mul(adj[2], di), k.mul(adj[3], di)];
        let bs = [
            k.frob_pow(f.m[0], nk),
            k.frob_pow(f.m[1], nk),
            k.frob_pow(f.m[2], nk),
            k.frob_pow(f.m[3], nk),
        ];
        let m = mat_mul(k, &binv, &bs);
        // mu^(q-1) with mu^2 = lambda
        let e = k.pow(f.lambda, (self.k.q() - 1) / 2);
        let v = self.normalize(&m, e);
        if !self.contains(&v) {
            return Err(Error::NotAutomorphism);
        }
        Ok(v)
    }

    /// Render an automorphism for reports.
    pub fn describe(&self, a: &Automorphism) -> String {
        let k = &self.big;
        format!(
            "([{}, {}; {}, {}], {})",
            k.fmt_elem(a.m[0]),
            k.fmt_elem(a.m[1]),
            k.fmt_elem(a.m[2]),
            k.fmt_elem(a.m[3]),
            k.fmt_elem(a.e)
        )
    }
}

/// Fixed points on P^1 of a non-scalar matrix, in the matrix's field.
fn mobius_fixed_points(k: &FieldCtx, m: &[Fe; 4]) -> Vec<Point1> {
    let [a, b, c, d] = *m;
    let mut out = Vec::new();
    if c.is_zero() {
        out.push([k.one(), Fe::ZERO]);
        let dma = k.sub(d, a);
        if !dma.is_zero() {
            out.push([k.div(b, dma).unwrap(), k.one()]);
        }
        return out;
    }
    // c x^2 + (d - a) x - b = 0
    let bq = k.sub(d, a);
    let disc = k.add(k.square(bq), k.scale(k.mul(b, c), 4));
    if let Some(r) = k.sqrt(disc) {
        let two_c = k.scale(c, 2);
        for s in [r, k.neg(r)] {
            let x = k.div(k.sub(s, bq), two_c).unwrap();
            let pt = [x, k.one()];
            if !out.contains(&pt) {
                out.push(pt);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(p: u64, n: usize, s: &str) -> CurveModel {
        let k = FieldCtx::new(p, n).unwrap();
        CurveModel::parse(&k, s).unwrap()
    }

    #[test]
    fn shapes() {
        assert_eq!(curve(7, 1, "y^2=x^5-1").weierstrass_shape().unwrap().to_string(), "(1)^2(4)");
        assert_eq!(curve(11, 1, "y^2=x^6-1").weierstrass_shape().unwrap().to_string(), "(1)^2(2)^2");
        assert_eq!(curve(7, 1, "y^2=x^6-1").weierstrass_shape().unwrap().to_string(), "(1)^6");
    }

    #[test]
    fn twist_models() {
        let c = curve(7, 1, "y^2=x^5-1");
        let t = c.hyperelliptic_twist();
        let k = c.ctx();
        assert_eq!(t.f().unwrap(), &Polynomial::from_ints(k, &[-3, 0, 0, 0, 0, 3]));
        let c2 = curve(2, 1, "y^2+y=x^5");
        match c2.hyperelliptic_twist() {
            CurveModel::Char2 { d, ctx, .. } => assert_eq!(d, ctx.one()),
            _ => unreachable!(),
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(Geometry::new(&curve(7, 1, "y^2=x^5-1")).unwrap().order(), 10);
        assert_eq!(Geometry::new(&curve(7, 1, "y^2=x^5-x")).unwrap().order(), 48);
        assert_eq!(Geometry::new(&curve(5, 1, "y^2=x^5-x")).unwrap().order(), 240);
        assert_eq!(Geometry::new(&curve(11, 1, "y^2=x^6-1")).unwrap().order(), 24);
    }

    #[test]
    fn rational_aut_counts() {
        let g = Geometry::new(&curve(11, 1, "y^2=x^6-1")).unwrap();
        let id = g.identity();
        assert_eq!(g.twist_aut_count(&id).unwrap(), 4);
        assert_eq!(g.reduced_aut_count(&id).unwrap(), 4);
        assert!(g.is_self_dual(&id).unwrap());
        let g5 = Geometry::new(&curve(5, 1, "y^2=x^5-x")).unwrap();
        assert_eq!(g5.twist_aut_count(&g5.identity()).unwrap(), 120);
        let g7 = Geometry::new(&curve(7, 1, "y^2=x^5-1")).unwrap();
        let id7 = g7.identity();
        assert_eq!(g7.reduced_aut_count(&id7).unwrap(), 1);
        assert!(!g7.is_self_dual(&id7).unwrap());
        let g48 = Geometry::new(&curve(7, 1, "y^2=x^5-x")).unwrap();
        assert!(g48.is_self_dual(&g48.identity()).unwrap());
    }

    #[test]
    fn group_closure_and_validity() {
        let g = Geometry::new(&curve(7, 1, "y^2=x^5-x")).unwrap();
        for a in g.group() {
            assert!(g.is_automorphism(a));
            assert_eq!(g.compose(a, &g.inverse(a)), g.identity());
            for b in g.group() {
                assert!(g.contains(&g.compose(a, b)));
            }
        }
    }

    #[test]
    fn twisted_orbit_example() {
        let c = curve(11, 1, "y^2=x^6-1");
        let g = Geometry::new(&c).unwrap();
        let k = g.big();
        let i = k.sqrt(k.neg(k.one())).unwrap();
        let v = g.make([Fe::ZERO, k.one(), k.one(), Fe::ZERO], i).unwrap();
        assert_eq!(g.twist_orbit_structure(&v).unwrap().to_string(), "(1)^6");
        assert_eq!(
            g.twist_orbit_structure(&g.identity()).unwrap(),
            c.weierstrass_shape().unwrap()
        );
        assert_eq!(
            g.twist_orbit_structure(&g.iota()).unwrap(),
            c.weierstrass_shape().unwrap()
        );
    }

    #[test]
    fn deg5_conversion() {
        let c = curve(7, 1, "y^2=x^6-1");
        let d = c.to_deg5().unwrap();
        assert!(d.is_deg5());
        assert_eq!(d.weierstrass_shape().unwrap(), c.weierstrass_shape().unwrap());
    }
}
