//! Borel Yangian series and their images in the quantized Zastava rings.
//!
//! The abstract Yangian is never built. Each relation is written as a
//! two-variable series identity with denominators cleared, pushed through the
//! map and checked coefficient by coefficient in the quotient.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::lie::BasisMode;
use crate::par;
use crate::poisson::{cartan, deformation_shifts, is_single_node, ClassicalIdeal, Generator, Sym};
use crate::report::{Report, Status};
use crate::ring::Ring;
use crate::scalar::Q;
use crate::series::TruncSeries;
use crate::uea::{QuantumIdeal, TermJson, UElem, Uea};
use crate::{Error, MultiPoly, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CartanType {
    Finite,
    Affine,
    Window,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanMatrix {
    pub kind: CartanType,
    pub entries: Vec<Vec<i64>>,
}

impl CartanMatrix {
    /// Type A_m on m nodes in a line.
    pub fn finite(m: usize) -> Self {
        let entries = (0..m)
            .map(|k| {
                (0..m)
                    .map(|l| match k.abs_diff(l) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect();
        CartanMatrix { kind: CartanType::Finite, entries }
    }

    /// Cyclic type on Z/n, one -1 per edge (so -2 between the two nodes when n = 2).
    pub fn affine(n: usize) -> Self {
        let entries = (0..n).map(|k| (0..n).map(|l| cartan(n, k, l)).collect()).collect();
        CartanMatrix { kind: CartanType::Affine, entries }
    }

    /// `len` consecutive nodes of A_infinity.
    pub fn window(len: usize) -> Self {
        CartanMatrix { kind: CartanType::Window, ..Self::finite(len) }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, k: usize, l: usize) -> i64 {
        self.entries[k][l]
    }
}

/// Element of U(a) used as a series coefficient.
#[derive(Clone)]
pub struct YElem {
    uea: Arc<Uea>,
    x: UElem,
}

impl YElem {
    pub fn new(uea: Arc<Uea>, x: UElem) -> Self {
        YElem { uea, x }
    }

    pub fn elem(&self) -> &UElem {
        &self.x
    }

    fn scalar_value(&self) -> Option<Q> {
        if self.x.is_zero() {
            return Some(Q::zero());
        }
        if self.x.len() == 1 {
            if let Some(c) = self.x.terms().get(&Vec::new()) {
                return Some(c.clone());
            }
        }
        None
    }

    fn with(&self, x: UElem) -> YElem {
        YElem { uea: self.uea.clone(), x }
    }
}

impl fmt::Debug for YElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "YElem({} terms)", self.x.len())
    }
}

impl Ring for YElem {
    fn zero_like(&self) -> Self {
        self.with(UElem::zero())
    }
    fn one_like(&self) -> Self {
        self.with(UElem::one())
    }
    fn add(&self, o: &Self) -> Self {
        self.with(self.x.add(&o.x))
    }
    fn mul(&self, o: &Self) -> Self {
        if let Some(c) = self.scalar_value() {
            return self.with(o.x.scale(&c));
        }
        if let Some(c) = o.scalar_value() {
            return self.with(self.x.scale(&c));
        }
        self.with(self.uea.mul(&self.x, &o.x))
    }
    fn scale(&self, c: &Q) -> Self {
        self.with(self.x.scale(c))
    }
    fn is_zero(&self) -> bool {
        self.x.is_zero()
    }
    fn neg(&self) -> Self {
        self.with(self.x.neg())
    }
    fn sub(&self, o: &Self) -> Self {
        self.with(self.x.sub(&o.x))
    }
    fn try_inv(&self) -> Option<Self> {
        match self.scalar_value() {
            Some(c) if !c.is_zero() => Some(self.with(UElem::scalar(c.recip()))),
            _ => None,
        }
    }
}

/// Monic A(u) of top degree d solving A(u - 1/2) = a(u) A(u + 1/2), with
/// `terms` coefficients. The coefficients of `a` must commute.
pub fn reconstruct_a<R: Ring>(a: &TruncSeries<R>, d: usize, terms: usize) -> Result<TruncSeries<R>> {
    if terms == 0 {
        return Err(Error::Precondition("need at least one coefficient".into()));
    }
    let zero = a.zero_elem().clone();
    let one = zero.one_like();
    for e in 1..=a.top().max(0) {
        if !a.coeff(e)?.is_zero() {
            return Err(Error::Inconsistent("a(u) has positive powers of u".into()));
        }
    }
    if !a.coeff(0)?.sub(&one).is_zero() {
        return Err(Error::Inconsistent("a(u) must start with 1".into()));
    }
    if !a.coeff(-1)?.add(&one.scale(&Q::from(d))).is_zero() {
        return Err(Error::Inconsistent(format!("the u^-1 coefficient of a(u) must be -{d}")));
    }
    let half = Q::frac(1, 2);
    let d = d as i64;
    let mut alpha = vec![one];
    for m in 1..terms {
        // alpha_m drops out at u^{d-m}; at u^{d-m-1} it enters with factor m.
        let mut c = alpha.clone();
        c.push(zero.clone());
        c.push(zero.clone());
        let p = TruncSeries::new(d, c, m + 2, zero.clone());
        let res = p.shift(&-&half)?.sub(&a.mul(&p.shift(&half)?));
        let e = res.coeff(d - m as i64 - 1)?;
        alpha.push(e.scale(&Q::from(m).recip()).neg());
    }
    Ok(TruncSeries::new(d, alpha, terms, zero))
}

/// A(u - 1/2) A(u + 1/2)^{-1} to `order` coefficients.
pub fn a_from_big_a<R: Ring>(big: &TruncSeries<R>, order: usize) -> Result<TruncSeries<R>> {
    let half = Q::frac(1, 2);
    let num = big.shift(&-&half)?;
    let den = big.shift(&half)?.inv(order)?;
    Ok(num.mul(&den).truncate(order))
}

/// Per-node spectral offsets S_k = sum_{m=1}^k w_m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OffsetRule {
    /// w_m = d_m
    D,
    /// w_m = d_m + mu_m
    DPlusMu,
}

impl OffsetRule {
    pub fn name(self) -> &'static str {
        match self {
            OffsetRule::D => "sum d",
            OffsetRule::DPlusMu => "sum (d+mu)",
        }
    }
}

/// Which quantum generators feed the map: with the scalar shift mu_l/d_l on
/// e_l (as in the relation suites) or without it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeneratorBase {
    Deformed,
    Undeformed,
}

impl GeneratorBase {
    pub fn name(self) -> &'static str {
        match self {
            GeneratorBase::Deformed => "deformed",
            GeneratorBase::Undeformed => "undeformed",
        }
    }
}

type S1 = TruncSeries<YElem>;
type S2 = TruncSeries<S1>;

/// Images of one Yangian node.
#[derive(Clone, Debug)]
pub struct NodeImage {
    /// Yangian node index (any integer in the affine case).
    pub index: i64,
    /// Quiver node it lands on.
    pub node: usize,
    pub d: usize,
    pub offset: Q,
    /// a_node(u + offset)
    pub a: S1,
    /// reconstruct_a of `a`
    pub big_a: S1,
    /// b_node(u + offset)
    pub x: S1,
}

#[derive(Serialize, Debug, Clone)]
pub struct NodeImageJson {
    pub index: i64,
    pub node: usize,
    pub offset: String,
    pub a: Vec<(i64, Vec<TermJson>)>,
    pub big_a: Vec<(i64, Vec<TermJson>)>,
    pub x: Vec<(i64, Vec<TermJson>)>,
}

impl NodeImage {
    pub fn to_json(&self) -> NodeImageJson {
        let conv = |s: &S1| s.reliable_terms().into_iter().map(|(e, c)| (e, c.uea.to_json(&c.x))).collect();
        NodeImageJson {
            index: self.index,
            node: self.node,
            offset: self.offset.to_string(),
            a: conv(&self.a),
            big_a: conv(&self.big_a),
            x: conv(&self.x),
        }
    }
}

/// The map from the Borel Yangian to U(a) (reduction applied when checking).
pub struct Phi {
    uea: Arc<Uea>,
    mu: Vec<Q>,
    rule: OffsetRule,
    base: GeneratorBase,
    terms: usize,
    a_base: Vec<S1>,
    b_base: Vec<S1>,
}

impl Phi {
    /// Series are kept to `terms` coefficients.
    pub fn new(n: usize, d: &[i64], mu: &[Q], rule: OffsetRule, base: GeneratorBase, terms: usize) -> Result<Phi> {
        let uea = Arc::new(Uea::new(n, d, BasisMode::Diag)?);
        Self::with_uea(uea, mu, rule, base, terms)
    }

    pub fn with_uea(uea: Arc<Uea>, mu: &[Q], rule: OffsetRule, base: GeneratorBase, terms: usize) -> Result<Phi> {
        let n = uea.n();
        if mu.len() != n {
            return Err(Error::Precondition(format!("mu must have length {n}")));
        }
        if terms < 2 {
            return Err(Error::Precondition("need at least two series terms".into()));
        }
        let du = uea.d().to_vec();
        let shifts = match base {
            GeneratorBase::Deformed => deformation_shifts(&du, mu)?,
            GeneratorBase::Undeformed => vec![Q::zero(); n],
        };
        let zero = YElem::new(uea.clone(), UElem::zero());
        let mut a_base = Vec::new();
        let mut b_base = Vec::new();
        for l in 0..n {
            let y = |x: UElem| YElem::new(uea.clone(), x);
            let mut ac = vec![y(UElem::one()), y(UElem::scalar(-Q::from(du[l])))];
            let mut bc = Vec::new();
            for r in 1..terms - 1 {
                let a = if du[l] == 0 { UElem::zero() } else { uea.generator(&Generator::A { l, r }, &shifts)? };
                ac.push(y(a.neg()));
            }
            for s in 0..terms {
                let b = if du[l] == 0 { UElem::zero() } else { uea.generator(&Generator::B { l, s }, &shifts)? };
                bc.push(y(b));
            }
            a_base.push(TruncSeries::new(0, ac, terms, zero.clone()));
            b_base.push(TruncSeries::new(-1, bc, terms, zero.clone()));
        }
        Ok(Phi { uea, mu: mu.to_vec(), rule, base, terms, a_base, b_base })
    }

    /// Unshifted a_l(u) of node `l`.
    pub fn a_series(&self, l: usize) -> Result<&TruncSeries<YElem>> {
        self.a_base.get(l).ok_or_else(|| Error::IndexOutOfRange(format!("node {l}")))
    }

    pub fn uea(&self) -> &Arc<Uea> {
        &self.uea
    }

    pub fn rule(&self) -> OffsetRule {
        self.rule
    }

    pub fn base(&self) -> GeneratorBase {
        self.base
    }

    fn weight(&self, m: i64) -> Q {
        let n = self.uea.n() as i64;
        let l = m.rem_euclid(n) as usize;
        let d = Q::from(self.uea.d()[l]);
        match self.rule {
            OffsetRule::D => d,
            OffsetRule::DPlusMu => &d + &self.mu[l],
        }
    }

    /// S_k, extended to k <= 0 so that S_k - S_{k-1} = w_k for every k.
    pub fn offset(&self, k: i64) -> Q {
        let mut s = Q::zero();
        if k >= 0 {
            for m in 1..=k {
                s = &s + &self.weight(m);
            }
        } else {
            for m in (k + 1)..=0 {
                s = &s - &self.weight(m);
            }
        }
        s
    }

    /// Period of the offsets: sum over one turn of the cycle.
    pub fn beta(&self) -> Q {
        (1..=self.uea.n() as i64).fold(Q::zero(), |s, m| &s + &self.weight(m))
    }

    pub fn node(&self, k: i64) -> Result<NodeImage> {
        let n = self.uea.n();
        let l = k.rem_euclid(n as i64) as usize;
        let offset = self.offset(k);
        let a = self.a_base[l].shift(&offset)?;
        let x = self.b_base[l].shift(&offset)?;
        let d = self.uea.d()[l];
        let big_a = reconstruct_a(&a, d, self.terms - 1)?;
        Ok(NodeImage { index: k, node: l, d, offset, a, big_a, x })
    }
}

/// Node data of the finite map (offsets sum d).
pub fn phi_image(n: usize, d: &[i64], mu: &[Q], k: i64, terms: usize) -> Result<NodeImage> {
    Phi::new(n, d, mu, OffsetRule::D, GeneratorBase::Deformed, terms)?.node(k)
}

/// f(u) g(v) (or g(v) f(u) when `f_first` is false) as a series in u whose
/// coefficients are series in v. Same truncation as the nested product.
fn tensor(f: &S1, g: &S1, f_first: bool) -> S2 {
    let fu: Vec<(i64, YElem)> = f.reliable_terms();
    let gv: Vec<(i64, YElem)> = g.reliable_terms();
    let pairs: Vec<(usize, usize)> = (0..fu.len()).flat_map(|i| (0..gv.len()).map(move |j| (i, j))).collect();
    let prods = par::map(&pairs, |&(i, j)| if f_first { fu[i].1.mul(&gv[j].1) } else { gv[j].1.mul(&fu[i].1) });
    let zero = f.zero_elem().clone();
    let inner = |row: Vec<YElem>| match g.order() {
        Some(o) => TruncSeries::new(g.top(), row, o, zero.clone()),
        None => TruncSeries::exact(g.top(), row, zero.clone()),
    };
    let mut rows = Vec::with_capacity(fu.len());
    let mut it = prods.into_iter();
    for _ in 0..fu.len() {
        rows.push(inner(it.by_ref().take(gv.len()).collect()));
    }
    let z2 = TruncSeries::zero_series(zero.clone());
    match f.order() {
        Some(o) => TruncSeries::new(f.top(), rows, o, z2),
        None => TruncSeries::exact(f.top(), rows, z2),
    }
}

/// alpha u + beta v + gamma, exactly.
fn linear(unit: &YElem, alpha: i64, beta: i64, gamma: i64) -> S2 {
    let zero = unit.zero_like();
    let lead = TruncSeries::exact(0, vec![unit.scale(&Q::from(alpha))], zero.clone());
    let rest = TruncSeries::exact(1, vec![unit.scale(&Q::from(beta)), unit.scale(&Q::from(gamma))], zero.clone());
    TruncSeries::exact(1, vec![lead, rest], TruncSeries::zero_series(zero))
}

fn coeff2(s: &S2, eu: i64, ev: i64) -> Result<UElem> {
    Ok(s.coeff(eu)?.coeff(ev)?.x)
}

/// Zero test in the quotient: identity, diagonal reduction, rank-one
/// rewriting, then linear algebra up to degree `cap`.
fn zero_status(ideal: &QuantumIdeal, x: &UElem, cap: usize) -> Result<(Status, String)> {
    if x.is_zero() {
        return Ok((Status::Pass, "identity in U(a)".into()));
    }
    let red = ideal.reduce(x);
    if red.is_zero() {
        return Ok((Status::Pass, "diagonal reduction".into()));
    }
    if let Some(nf) = ideal.normal_form_rank_one(&red) {
        let st = if nf.is_zero() { Status::Pass } else { Status::Fail };
        return Ok((st, "rewriting mod ideal".into()));
    }
    let deg = red.degree().unwrap_or(0);
    if deg > cap {
        return Ok((Status::Skipped, format!("degree {deg} above the linear-algebra cap {cap}")));
    }
    let m = ideal.contains_linear(&red, deg.max(2), false)?;
    Ok((if m.member { Status::Pass } else { Status::Fail }, format!("linear algebra mod ideal, bound {}", m.bound)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YangianMode {
    Finite,
    Affine,
}

const LINEAR_CAP: usize = 8;

struct Pending {
    relation: String,
    instance: String,
    value: std::result::Result<UElem, Error>,
}

fn push_checks(rep: &mut Report, ideal: &QuantumIdeal, pend: Vec<Pending>) {
    let rows = par::map(&pend, |p| match &p.value {
        Ok(x) => zero_status(ideal, x, LINEAR_CAP),
        Err(e) => Err(e.clone()),
    });
    for (p, row) in pend.into_iter().zip(rows) {
        match row {
            Ok((st, detail)) => rep.push(p.relation, p.instance, st).detail = Some(detail),
            Err(e) => rep.push(p.relation, p.instance, Status::Fail).detail = Some(e.to_string()),
        }
    }
}

/// Coefficient-wise relation suite for Yangian nodes `idx` with Cartan entries
/// `c(k, l)` (None marks a pair that is not checked).
fn relation_suite(
    phi: &Phi,
    idx: &[i64],
    c: &dyn Fn(i64, i64) -> Option<i64>,
    order: usize,
    label: &str,
) -> Result<Vec<Pending>> {
    let images: Vec<NodeImage> = idx.iter().map(|&k| phi.node(k)).collect::<Result<_>>()?;
    let unit = YElem::new(phi.uea.clone(), UElem::one());
    let mut out = Vec::new();
    let ord = order as i64;
    let mut push = |relation: &str, instance: String, value: Result<UElem>| {
        out.push(Pending { relation: relation.into(), instance: format!("{label}{instance}"), value });
    };
    let uv2 = linear(&unit, 1, -1, 0).mul(&linear(&unit, 1, -1, 0));
    for (ik, nk) in images.iter().enumerate() {
        for (il, nl) in images.iter().enumerate() {
            let (k, l) = (nk.index, nl.index);
            let Some(ckl) = c(k, l) else { continue };
            let delta = (k == l) as i64;
            if ik <= il {
                let s = tensor(&nk.a, &nl.a, true).sub(&tensor(&nk.a, &nl.a, false));
                for i in 1..=ord {
                    for j in 1..=ord {
                        push("[a_k(u),a_l(v)]=0", format!("k={k} l={l} u^-{i} v^-{j}"), coeff2(&s, -i, -j));
                    }
                }
                let lhs = tensor(&nk.x, &nl.x, true).mul(&linear(&unit, 2, -2, -ckl));
                let rhs = tensor(&nk.x, &nl.x, false).mul(&linear(&unit, 2, -2, ckl));
                let s = lhs.sub(&rhs);
                for i in 1..=ord {
                    for j in 1..=ord {
                        push(
                            "x_k(u)x_l(v)(2u-2v-c)=x_l(v)x_k(u)(2u-2v+c)",
                            format!("k={k} l={l} c={ckl} u^-{i} v^-{j}"),
                            coeff2(&s, -i, -j),
                        );
                    }
                }
            }
            let (ax, xa) = (tensor(&nk.a, &nl.x, true), tensor(&nk.a, &nl.x, false));
            let s = ax.sub(&xa).mul(&uv2);
            let s = if delta == 1 { s.add(&xa) } else { s };
            for i in 1..=ord {
                for j in 1..=ord {
                    push("[a_k(u),x_l(v)](u-v)^2=-delta x_l(v)a_k(u)", format!("k={k} l={l} u^-{i} v^-{j}"), coeff2(&s, -i, -j));
                }
            }
            let s = tensor(&nk.big_a, &nl.x, true)
                .mul(&linear(&unit, 2, -2, delta))
                .sub(&tensor(&nk.big_a, &nl.x, false).mul(&linear(&unit, 2, -2, -delta)));
            let top = nk.d as i64;
            for i in 0..ord {
                for j in 1..=ord {
                    push(
                        "A_k(u)x_l(v)(2u-2v+delta)=x_l(v)A_k(u)(2u-2v-delta)",
                        format!("k={k} l={l} u^{} v^-{j}", top - i),
                        coeff2(&s, top - i, -j),
                    );
                }
            }
            if ckl == -1 {
                let serre_max = order.min(3);
                let xc = |m: &NodeImage, r: usize| -> Result<UElem> { Ok(m.x.coeff(-(r as i64) - 1)?.x) };
                for r in 0..serre_max {
                    for p in 0..=r {
                        for s in 0..serre_max {
                            let v = (|| -> Result<UElem> {
                                let (xr, xp, xs) = (xc(nk, r)?, xc(nk, p)?, xc(nl, s)?);
                                let u = &phi.uea;
                                let t1 = u.commutator(&xr, &u.commutator(&xp, &xs));
                                let t2 = u.commutator(&xp, &u.commutator(&xr, &xs));
                                Ok(t1.add(&t2))
                            })();
                            push("serre", format!("k={k} l={l} r={r} p={p} s={s}"), v);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A_{k,r} = coefficient of u^{d_k - r - 1} in A_k(u), for d_k < r <= d_k + 3.
fn kernel_checks(phi: &Phi, idx: &[i64], label: &str) -> Result<Vec<Pending>> {
    let mut out = Vec::new();
    for &k in idx {
        let m = phi.node(k)?;
        let d = m.d as i64;
        for r in (d + 1)..=(d + 3) {
            out.push(Pending {
                relation: "A_{k,r}=0 for r>d_k".into(),
                instance: format!("{label}k={k} r={r}"),
                value: m.big_a.coeff(d - r - 1).map(|c| c.x),
            });
        }
    }
    Ok(out)
}

/// Terms kept per series so that every checked coefficient is reliable.
fn series_terms(order: usize, dmax: usize) -> usize {
    (order + 3).max(dmax + 6)
}

/// Relation suite of the Borel Yangian pushed through the map.
///
/// Finite mode needs d_0 = 0 and uses nodes 1..n-1, undeformed generators
/// and offsets sum (d + mu), which is sum d when mu = 0.
/// Affine mode uses the window of Yangian nodes 1..=n+1 in A_infinity, tests
/// the shift identity A_{k+n}(u) = A_k(u + beta) for each offset rule, and runs
/// the suite with the first rule that passes.
pub fn verify_yangian_relations(
    n: usize,
    d: &[i64],
    mu: &[Q],
    order: usize,
    mode: YangianMode,
    beta: Option<Q>,
) -> Result<Report> {
    if d.iter().sum::<i64>() > 4 {
        return Err(Error::SizeLimit("sum of d_l must be at most 4 for Yangian checks".into()));
    }
    if order == 0 || order > 8 {
        return Err(Error::SizeLimit("order must lie in 1..=8".into()));
    }
    let uea = Arc::new(Uea::new(n, d, BasisMode::Diag)?);
    let du = uea.d().to_vec();
    if mu.len() != n {
        return Err(Error::Precondition(format!("mu must have length {n}")));
    }
    let ideal = QuantumIdeal::new(&uea, mu)?;
    let terms = series_terms(order, du.iter().copied().max().unwrap_or(0));
    let mut rep = Report::new();
    match mode {
        YangianMode::Finite => {
            if du[0] != 0 {
                return Err(Error::Precondition("the finite map needs d_0 = 0".into()));
            }
            let phi = Phi::with_uea(uea.clone(), mu, OffsetRule::DPlusMu, GeneratorBase::Undeformed, terms)?;
            let idx: Vec<i64> = (1..n).filter(|&k| du[k] > 0).map(|k| k as i64).collect();
            let c = |k: i64, l: i64| -> Option<i64> {
                Some(match k.abs_diff(l) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
            };
            let mut pend = relation_suite(&phi, &idx, &c, order, "")?;
            pend.extend(kernel_checks(&phi, &idx, "")?);
            push_checks(&mut rep, &ideal, pend);
        }
        YangianMode::Affine => {
            let paper_beta = (0..n).fold(Q::zero(), |s, l| &(&s + &Q::from(du[l])) + &mu[l]);
            let beta = beta.unwrap_or(paper_beta);
            // Every (offset rule, generator base) pair is tried: first the
            // shift identity, then the relation suite on the window. The
            // reported choice is the first pair passing both, else the first
            // passing the shift identity.
            let idx: Vec<i64> = (1..=n as i64 + 1).filter(|&k| du[k.rem_euclid(n as i64) as usize] > 0).collect();
            let nn = n as i64;
            let c = |k: i64, l: i64| -> Option<i64> {
                // Pairs congruent to an equal or adjacent pair but not adjacent in
                // the window: periodicity makes their A_infinity relation
                // contradict the window relation of the congruent pair.
                let m = (k - l).rem_euclid(nn);
                let dist = k.abs_diff(l);
                if (dist >= 1 && m == 0) || (dist >= 2 && (m == 1 || m == nn - 1)) {
                    return None;
                }
                Some(match k.abs_diff(l) {
                    0 => 2,
                    1 => -1,
                    _ => 0,
                })
            };
            let mut best: Option<(usize, String)> = None;
            let mut suites = Vec::new();
            for rule in [OffsetRule::DPlusMu, OffsetRule::D] {
                for base in [GeneratorBase::Undeformed, GeneratorBase::Deformed] {
                    let label = format!("rule={} base={} ", rule.name(), base.name());
                    let phi = Phi::with_uea(uea.clone(), mu, rule, base, terms)?;
                    let mut pend = Vec::new();
                    for k in 1..=nn {
                        let lo = phi.node(k)?;
                        let hi = phi.node(k + nn)?;
                        let shifted = lo.big_a.shift(&beta)?;
                        let top = lo.d as i64;
                        for e in (-4..top).rev() {
                            let v = hi.big_a.coeff(e).and_then(|h| Ok(h.x.sub(&shifted.coeff(e)?.x)));
                            pend.push(Pending {
                                relation: "A_{k+n}(u)=A_k(u+beta)".into(),
                                instance: format!("{label}beta={beta} k={k} u^{e}"),
                                value: v,
                            });
                        }
                    }
                    let mut shift_rep = Report::new();
                    push_checks(&mut shift_rep, &ideal, pend);
                    let shift_ok = shift_rep.entries.iter().all(|e| e.status == Status::Pass);
                    let mut suite = Report::new();
                    let mut pend = relation_suite(&phi, &idx, &c, order, &label)?;
                    pend.extend(kernel_checks(&phi, &idx[..idx.len().min(n)], &label)?);
                    push_checks(&mut suite, &ideal, pend);
                    let suite_ok = suite.all_ok();
                    rep.extend(shift_rep);
                    let score = match (shift_ok, suite_ok) {
                        (true, true) => 2,
                        (true, false) => 1,
                        _ => 0,
                    };
                    if score > best.as_ref().map_or(0, |b| b.0) {
                        best = Some((score, label.trim().to_string()));
                    }
                    suites.push((label, suite_ok, suite));
                }
            }
            for (label, ok, suite) in suites {
                rep.push("relation suite", label.trim(), if ok { Status::Pass } else { Status::Fail }).detail =
                    Some(format!("{} of {} coefficient checks fail", suite.count(Status::Fail), suite.entries.len()));
                rep.extend(suite);
            }
            match best {
                Some((score, label)) => {
                    let e = rep.push("affine offset rule", format!("beta={beta}"), Status::Pass);
                    e.detail = Some(if score == 2 {
                        format!("validated: {label} (shift identity and relation suite)")
                    } else {
                        format!("validated: {label} (shift identity only; the relation suite fails)")
                    });
                }
                None => {
                    rep.push("affine offset rule", format!("beta={beta}"), Status::Fail).detail =
                        Some("no candidate satisfies the shift identity".into());
                }
            }
            for &k in &idx {
                for &l in &idx {
                    if c(k, l).is_none() {
                        rep.push("pair", format!("k={k} l={l}"), Status::Skipped).detail =
                            Some("congruent mod n to an equal or adjacent pair; periodicity contradicts far commutation".into());
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Classical limit: the same relations with Poisson brackets on symbols, no
/// spectral offsets, and A_k(u) = det(u - E_k) built from power sums.
pub fn classical_limit_relations(n: usize, d: &[i64], order: usize) -> Result<Report> {
    if d.iter().sum::<i64>() > 4 {
        return Err(Error::SizeLimit("sum of d_l must be at most 4".into()));
    }
    let sym = Sym::new(n, d)?;
    let du = sym.d().to_vec();
    let zeros = vec![Q::zero(); n];
    let ideal = ClassicalIdeal::new(&sym, Some(&zeros));
    let single = is_single_node(&du);
    let nodes: Vec<usize> = (0..n).filter(|&l| du[l] > 0).collect();
    let terms = order + 2;
    let mut big_a: Vec<Vec<MultiPoly>> = vec![Vec::new(); n];
    let mut b: Vec<Vec<MultiPoly>> = vec![Vec::new(); n];
    for &l in &nodes {
        let p: Vec<MultiPoly> =
            (1..=terms).map(|r| sym.generator(&Generator::A { l, r }, &zeros)).collect::<Result<_>>()?;
        // Newton: j alpha_j = -sum_{i=1}^j p_i alpha_{j-i}
        let mut alpha = vec![sym.constant(Q::one())];
        for j in 1..=terms {
            let mut acc = sym.zero();
            for i in 1..=j {
                acc = acc.add(&p[i - 1].mul(&alpha[j - i]));
            }
            alpha.push(acc.scale(&-Q::from(j).recip()));
        }
        big_a[l] = alpha;
        b[l] = (0..=terms).map(|s| sym.generator(&Generator::B { l, s }, &zeros)).collect::<Result<_>>()?;
    }
    let mut items: Vec<(String, String, MultiPoly)> = Vec::new();
    let br = |f: &MultiPoly, g: &MultiPoly| sym.bracket(f, g);
    for &k in &nodes {
        for &l in &nodes {
            let c = cartan(n, k, l);
            let delta = (k == l) as i64;
            for i in 1..=order {
                for j in 1..=order {
                    items.push((
                        "{A_k(u),A_l(v)}=0".into(),
                        format!("k={k} l={l} i={i} j={j}"),
                        br(&big_a[k][i], &big_a[l][j])?,
                    ));
                }
            }
            // (u-v){A_k(u),x_l(v)} + delta A_k(u)x_l(v) at u^{d_k-i} v^{-j}
            for i in 0..order {
                for j in 1..=order {
                    let mut f = br(&big_a[k][i + 1], &b[l][j - 1])?.sub(&br(&big_a[k][i], &b[l][j])?);
                    if delta == 1 {
                        f = f.add(&big_a[k][i].mul(&b[l][j - 1]));
                    }
                    items.push(("{A_k(u),x_l(v)}=-delta A x/(u-v)".into(), format!("k={k} l={l} i={i} j={j}"), f));
                }
            }
            if k <= l && (k == l || c != 0) {
                for i in 1..=order {
                    for j in 1..=order {
                        let f = br(&b[k][i], &b[l][j - 1])?
                            .sub(&br(&b[k][i - 1], &b[l][j])?)
                            .sub(&b[k][i - 1].mul(&b[l][j - 1]).scale(&Q::from(c)));
                        items.push(("{x_k(u),x_l(v)}=c x x/(u-v)".into(), format!("k={k} l={l} c={c} i={i} j={j}"), f));
                    }
                }
            }
            if k != l && c == -1 {
                let m = order.min(3);
                for r in 0..m {
                    for p in 0..=r {
                        for s in 0..m {
                            let f = br(&b[k][r], &br(&b[k][p], &b[l][s])?)?.add(&br(&b[k][p], &br(&b[k][r], &b[l][s])?)?);
                            items.push(("serre".into(), format!("k={k} l={l} r={r} p={p} s={s}"), f));
                        }
                    }
                }
            }
        }
    }
    let rows = par::map(&items, |(_, _, f)| {
        if f.is_zero() {
            (Status::Pass, "identity".to_string())
        } else if single {
            (Status::Fail, "nonzero in S(a)".to_string())
        } else {
            let m = ideal.contains(f);
            (m.status, m.detail)
        }
    });
    let mut rep = Report::new();
    for ((rel, inst, _), (st, detail)) in items.into_iter().zip(rows) {
        rep.push(rel, inst, st).detail = Some(detail);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(top: i64, c: &[Q], order: usize) -> TruncSeries<Q> {
        TruncSeries::new(top, c.to_vec(), order, Q::zero())
    }

    #[test]
    fn reconstruct_scalar_polynomial() {
        // A(u) = (u - 1)(u - 3), a = A(u-1/2)/A(u+1/2)
        let big = TruncSeries::exact(2, vec![Q::one(), Q::from(-4), Q::from(3)], Q::zero());
        let a = a_from_big_a(&big, 10).unwrap();
        let back = reconstruct_a(&a, 2, 8).unwrap();
        for e in -5..=2 {
            assert_eq!(back.coeff(e).unwrap(), big.coeff(e).unwrap(), "u^{e}");
        }
    }

    #[test]
    fn reconstruct_trivial_and_errors() {
        let one = qs(0, &[Q::one()], 6);
        let big = reconstruct_a(&one, 0, 5).unwrap();
        assert_eq!(big.coeff(0).unwrap(), Q::one());
        for e in -4..0 {
            assert!(big.coeff(e).unwrap().is_zero());
        }
        let bad = qs(0, &[Q::one(), Q::from(-2)], 6);
        assert!(reconstruct_a(&bad, 1, 3).is_err());
    }

    #[test]
    fn reconstruct_d1_gives_u_minus_e_minus_half() {
        let phi = Phi::new(2, &[0, 1], &[Q::zero(), Q::zero()], OffsetRule::D, GeneratorBase::Deformed, 8).unwrap();
        let a = phi.a_base[1].clone();
        let big = reconstruct_a(&a, 1, 6).unwrap();
        let e = phi.uea().letter(crate::BasisIndex::E(1, 1, 1)).unwrap();
        assert_eq!(big.coeff(1).unwrap().x, UElem::one());
        assert_eq!(big.coeff(0).unwrap().x, e.neg().sub(&UElem::scalar(Q::frac(1, 2))));
        for r in 1..5 {
            assert!(big.coeff(-r).unwrap().x.is_zero(), "A_{r}");
        }
    }

    #[test]
    fn offsets() {
        let mu = vec![Q::one(), Q::zero()];
        let phi = Phi::new(2, &[1, 1], &mu, OffsetRule::DPlusMu, GeneratorBase::Deformed, 4).unwrap();
        assert_eq!(phi.beta(), Q::from(3));
        assert_eq!(phi.offset(1), Q::from(1));
        assert_eq!(phi.offset(2), Q::from(3));
        assert_eq!(phi.offset(3), Q::from(4));
        assert_eq!(&phi.offset(3) - &phi.offset(1), Q::from(3));
        assert_eq!(phi.offset(-1), Q::from(-2));
    }

    #[test]
    fn cartan_matrices() {
        let c = CartanMatrix::finite(3);
        assert_eq!(c.entries, vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        let a = CartanMatrix::affine(3);
        assert_eq!(a.entry(0, 2), -1);
        assert_eq!(CartanMatrix::affine(2).entry(0, 1), -2);
    }

    #[test]
    fn sl2_finite_suite_small() {
        let rep = verify_yangian_relations(2, &[0, 1], &[Q::zero(), Q::zero()], 3, YangianMode::Finite, None).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
    }

    #[test]
    fn classical_sl2() {
        let rep = classical_limit_relations(2, &[0, 2], 3).unwrap();
        assert!(rep.all_ok(), "{}", rep.to_text());
    }
}
