//! Exact enumeration of lattice trees, lattice animals and self-avoiding walks
//! with surface-contact and span statistics.
//!
//! Trees and animals are built from site classes (translation classes of site
//! sets, generated by Redelmeier's method) together with the spanning
//! structures each site set supports: every spanning tree for trees, every
//! connected spanning edge subset for subgraph animals, the full induced graph
//! for site animals. All contact and span statistics depend only on the site
//! set, so counting never materializes individual configurations.
//!
//! Walks are enumerated depth-first. Both engines split their search tree at a
//! fixed depth and fold each subtree independently; results are merged in the
//! serial order, so output never depends on the number of threads.

mod grid;
mod redelmeier;
mod spanning;
mod walks;

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    check_dim, AnimalConvention, Conformation, Edge, Polymer, PolymerKind, Site, Walk,
};

use grid::Grid;
use spanning::LocalEdges;
use walks::{WalkKind, WalkLeaf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Tree,
    Animal,
    Walk,
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Tree => "tree",
            Model::Animal => "animal",
            Model::Walk => "walk",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// One representative per translation class: lexicographically smallest site at the origin.
    TranslationClasses,
    /// Every configuration containing the origin (walks: starting at the origin).
    ContainsOrigin,
    /// Contains the origin and lies in `x_1 >= 0`.
    HalfSpace,
    /// Contains the origin, which is the lexicographically smallest surface site.
    LexStar,
    /// Walk bridges in the last coordinate direction.
    Bridge,
}

impl Constraint {
    pub fn name(&self) -> &'static str {
        match self {
            Constraint::TranslationClasses => "translation-classes",
            Constraint::ContainsOrigin => "contains-origin",
            Constraint::HalfSpace => "half-space",
            Constraint::LexStar => "lex-star",
            Constraint::Bridge => "bridge",
        }
    }
}

/// Which ensemble to enumerate. `n` counts sites for trees and animals and
/// steps for walks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub model: Model,
    pub dim: usize,
    pub n: usize,
    pub constraint: Constraint,
    pub convention: AnimalConvention,
}

impl EnsembleSpec {
    pub fn trees(dim: usize, n: usize, constraint: Constraint) -> Self {
        EnsembleSpec {
            model: Model::Tree,
            dim,
            n,
            constraint,
            convention: AnimalConvention::Site,
        }
    }

    pub fn animals(dim: usize, n: usize, constraint: Constraint, convention: AnimalConvention) -> Self {
        EnsembleSpec {
            model: Model::Animal,
            dim,
            n,
            constraint,
            convention,
        }
    }

    pub fn walks(dim: usize, n: usize, constraint: Constraint) -> Self {
        EnsembleSpec {
            model: Model::Walk,
            dim,
            n,
            constraint,
            convention: AnimalConvention::Site,
        }
    }

    pub fn with_n(&self, n: usize) -> Self {
        EnsembleSpec { n, ..*self }
    }

    pub fn with_constraint(&self, constraint: Constraint) -> Self {
        EnsembleSpec { constraint, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim)?;
        if self.n == 0 {
            return Err(Error::InvalidEnsemble("size must be at least 1".into()));
        }
        let ok = match (self.model, self.constraint) {
            (Model::Walk, Constraint::ContainsOrigin | Constraint::HalfSpace | Constraint::Bridge) => true,
            (Model::Walk, _) => false,
            (_, Constraint::Bridge) => false,
            _ => true,
        };
        if !ok {
            return Err(Error::InvalidEnsemble(format!(
                "constraint {} does not apply to {}",
                self.constraint.name(),
                self.model.name()
            )));
        }
        Ok(())
    }

    fn polymer_kind(&self) -> PolymerKind {
        match self.model {
            Model::Tree => PolymerKind::Tree,
            _ => PolymerKind::Animal(self.convention),
        }
    }
}

/// One enumerated configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Member {
    Polymer(Polymer),
    Walk(Walk),
}

impl Conformation for Member {
    fn dim(&self) -> usize {
        match self {
            Member::Polymer(p) => p.dim(),
            Member::Walk(w) => w.dim(),
        }
    }
    fn site_list(&self) -> Vec<Site> {
        match self {
            Member::Polymer(p) => p.site_list(),
            Member::Walk(w) => w.site_list(),
        }
    }
    fn num_sites(&self) -> usize {
        match self {
            Member::Polymer(p) => p.num_sites(),
            Member::Walk(w) => w.num_sites(),
        }
    }
}

impl Member {
    pub fn as_polymer(&self) -> Option<&Polymer> {
        match self {
            Member::Polymer(p) => Some(p),
            Member::Walk(_) => None,
        }
    }
    pub fn as_walk(&self) -> Option<&Walk> {
        match self {
            Member::Walk(w) => Some(w),
            Member::Polymer(_) => None,
        }
    }
}

/// Exact statistics of a whole ensemble.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub spec: EnsembleSpec,
    pub total: BigUint,
    /// Indexed by the number of surface sites.
    pub site_profile: Vec<BigUint>,
    /// Walks only: indexed by the number of surface edges.
    pub edge_profile: Option<Vec<BigUint>>,
    /// Indexed by span.
    pub span_histogram: Vec<BigUint>,
    /// Sum of surface-site counts over all members.
    pub contact_total: BigUint,
}

/// Number of members with exactly `k` contacts, `k = 0..`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceProfile {
    pub n: usize,
    pub counts: Vec<BigUint>,
}

impl SurfaceProfile {
    pub fn get(&self, k: usize) -> BigUint {
        self.counts.get(k).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Largest index with a nonzero count.
    pub fn max_k(&self) -> usize {
        self.counts.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanStats {
    pub n: usize,
    pub histogram: Vec<BigUint>,
    /// Spans at or below this value count as small; `u64::MAX` when unbounded.
    pub threshold: u64,
    pub below: BigUint,
    pub total: BigUint,
    pub fraction: BigRational,
}

impl SpanStats {
    pub fn fraction_f64(&self) -> f64 {
        self.fraction.to_f64().unwrap_or(f64::NAN)
    }
}

/// `floor(n / ln(n)^2)`, unbounded for `n <= 1`.
pub fn span_threshold(n: usize) -> u64 {
    let l = (n as f64).ln();
    if l <= 0.0 {
        return u64::MAX;
    }
    (n as f64 / (l * l)).floor() as u64
}

// ---------------------------------------------------------------------------
// Exact tallies

#[derive(Default, Clone)]
struct Tally {
    total: u128,
    site_profile: Vec<u128>,
    edge_profile: Vec<u128>,
    span: Vec<u128>,
    contact_total: u128,
    error: Option<Error>,
}

fn bump(v: &mut Vec<u128>, idx: usize, amount: u128) -> Result<()> {
    if v.len() <= idx {
        v.resize(idx + 1, 0);
    }
    v[idx] = v[idx].checked_add(amount).ok_or(Error::Overflow("tally"))?;
    Ok(())
}

fn add(acc: &mut u128, amount: u128) -> Result<()> {
    *acc = acc.checked_add(amount).ok_or(Error::Overflow("tally"))?;
    Ok(())
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b).ok_or(Error::Overflow("tally"))
}

fn merge_big(dst: &mut Vec<BigUint>, src: &[u128]) {
    if dst.len() < src.len() {
        dst.resize(src.len(), BigUint::zero());
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d += BigUint::from(*s);
    }
}

struct ClassInfo {
    sites: Vec<Site>,
    edges: LocalEdges,
    /// Number of sites in each `x_1` layer, starting at `x_1 = 0`.
    layers: Vec<usize>,
}

fn class_info(grid: &Grid, cells: &[usize]) -> ClassInfo {
    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    let mut edges = Vec::new();
    for (i, &c) in sorted.iter().enumerate() {
        for axis in 0..grid.dim {
            if let Ok(j) = sorted.binary_search(&(c + grid.stride(axis))) {
                edges.push((i, j));
            }
        }
    }
    edges.sort_unstable();
    let sites: Vec<Site> = sorted.iter().map(|&c| grid.site(c)).collect();
    let mut layers = Vec::new();
    for s in &sites {
        let l = s.x1() as usize;
        if layers.len() <= l {
            layers.resize(l + 1, 0);
        }
        layers[l] += 1;
    }
    ClassInfo {
        sites,
        edges,
        layers,
    }
}

fn multiplicity(spec: &EnsembleSpec, info: &ClassInfo) -> Result<u128> {
    let n = info.sites.len();
    match spec.polymer_kind() {
        PolymerKind::Tree => spanning::spanning_tree_count(n, &info.edges),
        PolymerKind::Animal(AnimalConvention::Site) => Ok(1),
        PolymerKind::Animal(AnimalConvention::Subgraph) => {
            Ok(spanning::connected_subgraph_masks(n, &info.edges).len() as u128)
        }
    }
}

fn tally_class(spec: &EnsembleSpec, info: &ClassInfo, t: &mut Tally) -> Result<()> {
    let m = multiplicity(spec, info)?;
    let n = info.sites.len() as u128;
    let span = info.layers.len();
    let s0 = info.layers[0] as u128;
    match spec.constraint {
        Constraint::TranslationClasses => {
            add(&mut t.total, m)?;
            bump(&mut t.site_profile, s0 as usize, m)?;
            bump(&mut t.span, span, m)?;
            add(&mut t.contact_total, mul(s0, m)?)?;
        }
        Constraint::ContainsOrigin => {
            add(&mut t.total, mul(n, m)?)?;
            for &s in &info.layers {
                bump(&mut t.site_profile, s, mul(s as u128, m)?)?;
                add(&mut t.contact_total, mul(mul(s as u128, s as u128)?, m)?)?;
            }
            bump(&mut t.span, span, mul(n, m)?)?;
        }
        Constraint::HalfSpace => {
            add(&mut t.total, mul(s0, m)?)?;
            bump(&mut t.site_profile, s0 as usize, mul(s0, m)?)?;
            bump(&mut t.span, span, mul(s0, m)?)?;
            add(&mut t.contact_total, mul(mul(s0, s0)?, m)?)?;
        }
        Constraint::LexStar => {
            add(&mut t.total, mul(span as u128, m)?)?;
            for &s in &info.layers {
                bump(&mut t.site_profile, s, m)?;
            }
            bump(&mut t.span, span, mul(span as u128, m)?)?;
            add(&mut t.contact_total, mul(n, m)?)?;
        }
        Constraint::Bridge => unreachable!("validated"),
    }
    Ok(())
}

fn tally_walk(leaf: &WalkLeaf, t: &mut Tally) -> Result<()> {
    add(&mut t.total, 1)?;
    bump(&mut t.site_profile, leaf.contacts, 1)?;
    bump(&mut t.edge_profile, leaf.edge_contacts, 1)?;
    bump(&mut t.span, leaf.span, 1)?;
    add(&mut t.contact_total, leaf.contacts as u128)
}

fn walk_kind(c: Constraint) -> WalkKind {
    match c {
        Constraint::HalfSpace => WalkKind::HalfSpace,
        Constraint::Bridge => WalkKind::Bridge,
        _ => WalkKind::Free,
    }
}

fn compute_summary(spec: &EnsembleSpec) -> Result<EnsembleSummary> {
    spec.validate()?;
    let tallies = match spec.model {
        Model::Walk => walks::fold_walks(
            spec.dim,
            spec.n,
            walk_kind(spec.constraint),
            Tally::default,
            |_, leaf, t| {
                if t.error.is_none() {
                    if let Err(e) = tally_walk(leaf, t) {
                        t.error = Some(e);
                    }
                }
            },
        ),
        _ => redelmeier::fold_classes(spec.dim, spec.n, Tally::default, |grid, cells, t| {
            if t.error.is_none() {
                let info = class_info(grid, cells);
                if let Err(e) = tally_class(spec, &info, t) {
                    t.error = Some(e);
                }
            }
        }),
    };
    let mut total = BigUint::zero();
    let mut site_profile = Vec::new();
    let mut edge_profile = Vec::new();
    let mut span = Vec::new();
    let mut contact_total = BigUint::zero();
    for t in tallies {
        if let Some(e) = t.error {
            return Err(e);
        }
        total += BigUint::from(t.total);
        contact_total += BigUint::from(t.contact_total);
        merge_big(&mut site_profile, &t.site_profile);
        merge_big(&mut edge_profile, &t.edge_profile);
        merge_big(&mut span, &t.span);
    }
    let max_sites = if spec.model == Model::Walk { spec.n + 1 } else { spec.n };
    site_profile.resize(max_sites + 1, BigUint::zero());
    span.resize(max_sites + 1, BigUint::zero());
    let edge_profile = (spec.model == Model::Walk).then(|| {
        edge_profile.resize(spec.n + 1, BigUint::zero());
        edge_profile
    });
    Ok(EnsembleSummary {
        spec: *spec,
        total,
        site_profile,
        edge_profile,
        span_histogram: span,
        contact_total,
    })
}

type Cache = Mutex<HashMap<EnsembleSpec, Arc<EnsembleSummary>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Exact summary of an ensemble, memoized per process.
pub fn summarize(spec: &EnsembleSpec) -> Result<Arc<EnsembleSummary>> {
    if let Some(s) = cache().lock().expect("cache poisoned").get(spec) {
        return Ok(Arc::clone(s));
    }
    let s = Arc::new(compute_summary(spec)?);
    cache()
        .lock()
        .expect("cache poisoned")
        .insert(*spec, Arc::clone(&s));
    Ok(s)
}

/// Summary computed afresh, bypassing the memo table.
pub fn summarize_uncached(spec: &EnsembleSpec) -> Result<EnsembleSummary> {
    compute_summary(spec)
}

pub fn count(spec: &EnsembleSpec) -> Result<BigUint> {
    Ok(summarize(spec)?.total.clone())
}

/// Contact histogram `left_N(k)`-style profile for half-space or
/// origin-containing ensembles.
pub fn surface_profile(spec: &EnsembleSpec) -> Result<SurfaceProfile> {
    if !matches!(spec.constraint, Constraint::HalfSpace | Constraint::ContainsOrigin) {
        return Err(Error::InvalidEnsemble(format!(
            "surface profiles need half-space or contains-origin, got {}",
            spec.constraint.name()
        )));
    }
    let s = summarize(spec)?;
    Ok(SurfaceProfile {
        n: spec.n,
        counts: s.site_profile.clone(),
    })
}

/// Histogram of surface-edge counts for walks.
pub fn edge_profile(spec: &EnsembleSpec) -> Result<SurfaceProfile> {
    if spec.model != Model::Walk {
        return Err(Error::InvalidEnsemble("edge contacts are defined for walks only".into()));
    }
    let s = summarize(spec)?;
    Ok(SurfaceProfile {
        n: spec.n,
        counts: s.edge_profile.clone().unwrap_or_default(),
    })
}

pub fn span_stats(spec: &EnsembleSpec) -> Result<SpanStats> {
    let s = summarize(spec)?;
    let threshold = span_threshold(spec.n);
    let below: BigUint = s
        .span_histogram
        .iter()
        .enumerate()
        .filter(|(sp, _)| (*sp as u64) <= threshold)
        .map(|(_, c)| c)
        .sum();
    let fraction = if s.total.is_zero() {
        BigRational::zero()
    } else {
        BigRational::new(below.clone().into(), s.total.clone().into())
    };
    Ok(SpanStats {
        n: spec.n,
        histogram: s.span_histogram.clone(),
        threshold,
        below,
        total: s.total.clone(),
        fraction,
    })
}

/// Half-space trees with exactly one surface site.
pub fn count_single_contact(n: usize, dim: usize) -> Result<BigUint> {
    if n < 2 {
        return Err(Error::Precondition("single-contact count needs N >= 2".into()));
    }
    Ok(surface_profile(&EnsembleSpec::trees(dim, n, Constraint::HalfSpace))?.get(1))
}

// ---------------------------------------------------------------------------
// Streams

fn polymer_members(
    spec: &EnsembleSpec,
    info: &ClassInfo,
    out: &mut Vec<Member>,
    limit: u64,
) -> Result<()> {
    let n = info.sites.len();
    let kind = spec.polymer_kind();
    let masks = match kind {
        PolymerKind::Tree => spanning::spanning_tree_masks(n, &info.edges),
        PolymerKind::Animal(AnimalConvention::Site) => {
            vec![if info.edges.is_empty() { 0 } else { u64::MAX >> (64 - info.edges.len()) }]
        }
        PolymerKind::Animal(AnimalConvention::Subgraph) => {
            spanning::connected_subgraph_masks(n, &info.edges)
        }
    };
    let shifts: Vec<Site> = match spec.constraint {
        Constraint::TranslationClasses => vec![Site::origin(spec.dim)],
        Constraint::ContainsOrigin => info.sites.clone(),
        Constraint::HalfSpace => info.sites.iter().filter(|s| s.x1() == 0).copied().collect(),
        Constraint::LexStar => (0..info.layers.len() as i32)
            .map(|l| *info.sites.iter().find(|s| s.x1() == l).expect("layer occupied"))
            .collect(),
        Constraint::Bridge => unreachable!("validated"),
    };
    let sites: BTreeSet<Site> = info.sites.iter().copied().collect();
    for mask in masks {
        let edges: BTreeSet<Edge> = info
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &(a, b))| Edge::new_unchecked(info.sites[a], info.sites[b]))
            .collect();
        let base = Polymer::from_parts_unchecked(kind, spec.dim, sites.clone(), edges);
        for s in &shifts {
            if out.len() as u64 >= limit {
                return Err(Error::ResourceLimit {
                    limit,
                    emitted: out.len() as u64,
                });
            }
            out.push(Member::Polymer(base.translate(&s.scale(-1))));
        }
    }
    Ok(())
}

/// Every member of the ensemble exactly once, in canonical order. Aborts with
/// [`Error::ResourceLimit`] once more than `limit` members would be produced.
pub fn enumerate(spec: &EnsembleSpec, limit: Option<u64>) -> Result<Vec<Member>> {
    spec.validate()?;
    let limit = limit.unwrap_or(u64::MAX);
    type Acc = (Vec<Member>, Option<Error>);
    let parts: Vec<Acc> = match spec.model {
        Model::Walk => walks::fold_walks(
            spec.dim,
            spec.n,
            walk_kind(spec.constraint),
            || (Vec::new(), None),
            |grid, leaf, acc: &mut Acc| {
                if acc.1.is_some() {
                    return;
                }
                if acc.0.len() as u64 >= limit {
                    acc.1 = Some(Error::ResourceLimit {
                        limit,
                        emitted: acc.0.len() as u64,
                    });
                    return;
                }
                let pts = leaf.points.iter().map(|&p| grid.site(p)).collect();
                acc.0.push(Member::Walk(Walk::new_unchecked(pts)));
            },
        ),
        _ => redelmeier::fold_classes(
            spec.dim,
            spec.n,
            || (Vec::new(), None),
            |grid, cells, acc: &mut Acc| {
                if acc.1.is_none() {
                    let info = class_info(grid, cells);
                    if let Err(e) = polymer_members(spec, &info, &mut acc.0, limit) {
                        acc.1 = Some(e);
                    }
                }
            },
        ),
    };
    let mut out = Vec::new();
    for (members, err) in parts {
        if let Some(Error::ResourceLimit { .. }) = err {
            return Err(Error::ResourceLimit {
                limit,
                emitted: (out.len() + members.len()) as u64,
            });
        }
        if let Some(e) = err {
            return Err(e);
        }
        out.extend(members);
        if out.len() as u64 > limit {
            return Err(Error::ResourceLimit {
                limit,
                emitted: out.len() as u64,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Super/submultiplicativity

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicativityRow {
    pub n: usize,
    pub m: usize,
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MultiplicativityReport {
    pub model: Model,
    pub convention: AnimalConvention,
    pub dim: usize,
    pub limit: usize,
    /// `a_N a_M <= a_{N+M}` for trees and animals, `c_{N+M} <= c_N c_M` for walks.
    pub relation: String,
    pub rows: Vec<MultiplicativityRow>,
    pub all_hold: bool,
}

/// Checks every pair `1 <= N <= M`, `N + M <= limit`.
pub fn supermultiplicativity_check(
    model: Model,
    convention: AnimalConvention,
    dim: usize,
    limit: usize,
) -> Result<MultiplicativityReport> {
    let spec = |n| match model {
        Model::Walk => EnsembleSpec::walks(dim, n, Constraint::ContainsOrigin),
        Model::Tree => EnsembleSpec::trees(dim, n, Constraint::TranslationClasses),
        Model::Animal => EnsembleSpec::animals(dim, n, Constraint::TranslationClasses, convention),
    };
    let counts: Vec<BigUint> = (1..=limit)
        .map(|n| count(&spec(n)))
        .collect::<Result<_>>()?;
    let c = |n: usize| &counts[n - 1];
    let mut rows = Vec::new();
    for n in 1..limit {
        for m in n..=limit - n {
            let (lhs, rhs) = match model {
                Model::Walk => (c(n + m).clone(), c(n) * c(m)),
                _ => (c(n) * c(m), c(n + m).clone()),
            };
            rows.push(MultiplicativityRow {
                n,
                m,
                holds: lhs <= rhs,
                lhs,
                rhs,
            });
        }
    }
    Ok(MultiplicativityReport {
        model,
        convention,
        dim,
        limit,
        relation: match model {
            Model::Walk => "c_{N+M} <= c_N c_M".into(),
            _ => "a_N a_M <= a_{N+M}".into(),
        },
        all_hold: rows.iter().all(|r| r.holds),
        rows,
    })
}
