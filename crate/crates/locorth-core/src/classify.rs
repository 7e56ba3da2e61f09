//! Classification of orthogonality inequalities under relabeling symmetries
//! and the no-signaling quotient.
//!
//! Two inequalities are considered equivalent when one maps to the other by
//! a combination of (i) permuting parties, (ii) relabeling the measurement
//! choices of single parties, (iii) relabeling outcomes of single
//! measurements, and (iv) adding linear combinations of the no-signaling and
//! normalization equalities.
//!
//! (i)-(iii) are handled by a multiplicity-guided normal form of the event
//! matrix. (iv) is handled by projecting the inequality's functional to
//! Collins-Gisin coordinates: per party and setting, the last outcome is
//! eliminated through normalization, so equal coordinate vectors hold
//! exactly when two functionals differ by no-signaling and normalization
//! equalities. The full-group invariant is the lexicographically minimal
//! quotient vector over the (i)-(iii) orbit.

use alloc::{collections::BTreeMap, vec, vec::Vec};
use core::fmt;

use num_traits::One;

use crate::inequalities::{InequalityError, LoInequality};
use crate::scenario::{orthogonality_graph, Event, GraphError, Scenario};
use crate::search::{visit_maximal_cliques, SearchBudget, SearchError};
use crate::Rational;

/// Cap on relabeling variants enumerated per inequality (including party
/// permutations) and on orbit sizes in the quotient minimization.
const ORBIT_LIMIT: u64 = 100_000_000;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ClassifyError {
    /// Symmetry element shapes do not match the scenario.
    DimensionMismatch,
    /// classify() inputs live on different scenarios.
    MixedScenarios,
    /// The relabeling orbit is too large to enumerate.
    OrbitBudgetExceeded,
    Inequality(InequalityError),
    Search(SearchError),
    Graph(GraphError),
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::DimensionMismatch => write!(f, "symmetry element shape mismatch"),
            ClassifyError::MixedScenarios => write!(f, "inequalities from different scenarios"),
            ClassifyError::OrbitBudgetExceeded => write!(f, "relabeling orbit budget exceeded"),
            ClassifyError::Inequality(e) => write!(f, "{e}"),
            ClassifyError::Search(e) => write!(f, "{e}"),
            ClassifyError::Graph(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ClassifyError {}

impl From<InequalityError> for ClassifyError {
    fn from(e: InequalityError) -> Self {
        ClassifyError::Inequality(e)
    }
}
impl From<SearchError> for ClassifyError {
    fn from(e: SearchError) -> Self {
        ClassifyError::Search(e)
    }
}
impl From<GraphError> for ClassifyError {
    fn from(e: GraphError) -> Self {
        ClassifyError::Graph(e)
    }
}

/// One element of the relabeling group (i)-(iii).
///
/// The action first relabels within each party (`outcome_perms[i][x][a]`,
/// `setting_perms[i][x]`), then permutes parties so that new party `i`
/// carries old party `party_perm[i]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SymmetryElement {
    pub party_perm: Vec<usize>,
    pub setting_perms: Vec<Vec<u8>>,
    pub outcome_perms: Vec<Vec<Vec<u8>>>,
}

impl SymmetryElement {
    pub fn identity(s: &Scenario) -> Self {
        let n = s.parties();
        let (m, d) = (s.settings(), s.outcomes());
        SymmetryElement {
            party_perm: (0..n).collect(),
            setting_perms: vec![(0..m as u8).collect(); n],
            outcome_perms: vec![vec![(0..d as u8).collect(); m]; n],
        }
    }

    fn check(&self, s: &Scenario) -> Result<(), ClassifyError> {
        let n = s.parties();
        let (m, d) = (s.settings(), s.outcomes());
        let perm_ok = self.party_perm.len() == n && {
            let mut seen = vec![false; n];
            self.party_perm
                .iter()
                .all(|&p| p < n && !core::mem::replace(&mut seen[p], true))
        };
        let settings_ok =
            self.setting_perms.len() == n && self.setting_perms.iter().all(|sp| is_perm(sp, m));
        let outcomes_ok = self.outcome_perms.len() == n
            && self
                .outcome_perms
                .iter()
                .all(|per_x| per_x.len() == m && per_x.iter().all(|op| is_perm(op, d)));
        if perm_ok && settings_ok && outcomes_ok {
            Ok(())
        } else {
            Err(ClassifyError::DimensionMismatch)
        }
    }

    /// Group inverse: applying `self` and then `self.inverse()` is the
    /// identity on events.
    pub fn inverse(&self) -> SymmetryElement {
        let n = self.party_perm.len();
        let mut inv_party = vec![0usize; n];
        for (i, &p) in self.party_perm.iter().enumerate() {
            inv_party[p] = i;
        }
        let mut setting_perms = Vec::with_capacity(n);
        let mut outcome_perms = Vec::with_capacity(n);
        for j in 0..n {
            // the inverse relabels party j with the inverses of the maps the
            // forward element applied at old party party_perm[j]
            let src = self.party_perm[j];
            let sp = &self.setting_perms[src];
            let mut sp_inv = vec![0u8; sp.len()];
            for (old, &new) in sp.iter().enumerate() {
                sp_inv[new as usize] = old as u8;
            }
            let mut op_inv = vec![Vec::new(); sp.len()];
            for (x_new, slot) in op_inv.iter_mut().enumerate() {
                let x_old = sp_inv[x_new] as usize;
                let op = &self.outcome_perms[src][x_old];
                let mut inv = vec![0u8; op.len()];
                for (old, &new) in op.iter().enumerate() {
                    inv[new as usize] = old as u8;
                }
                *slot = inv;
            }
            setting_perms.push(sp_inv);
            outcome_perms.push(op_inv);
        }
        SymmetryElement { party_perm: inv_party, setting_perms, outcome_perms }
    }

    fn apply_event(&self, e: &Event) -> Event {
        let n = e.parties();
        let mut ra = vec![0u8; n];
        let mut rx = vec![0u8; n];
        for i in 0..n {
            let x = e.settings[i] as usize;
            ra[i] = self.outcome_perms[i][x][e.outcomes[i] as usize];
            rx[i] = self.setting_perms[i][x];
        }
        let outcomes = (0..n).map(|i| ra[self.party_perm[i]]).collect();
        let settings = (0..n).map(|i| rx[self.party_perm[i]]).collect();
        Event::new(outcomes, settings)
    }
}

fn is_perm(p: &[u8], k: usize) -> bool {
    p.len() == k && {
        let mut seen = vec![false; k];
        p.iter()
            .all(|&v| (v as usize) < k && !core::mem::replace(&mut seen[v as usize], true))
    }
}

/// Relabeled inequality; orthogonality is preserved by the group action and
/// re-verified on construction.
pub fn apply_symmetry(
    i: &LoInequality,
    elem: &SymmetryElement,
) -> Result<LoInequality, ClassifyError> {
    elem.check(i.scenario())?;
    let events = i.events().iter().map(|e| elem.apply_event(e)).collect();
    Ok(LoInequality::from_events(*i.scenario(), events)?)
}

/// Coefficients of an inequality's left-hand side in Collins-Gisin
/// coordinates: one constant coordinate plus, per party, `m (d-1)`
/// single-party marginal coordinates, combined party-major. Two
/// inequalities have equal vectors exactly when they differ by a linear
/// combination of no-signaling and normalization equalities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct QuotientVector {
    coords: Vec<i64>,
}

impl QuotientVector {
    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// True iff the functional is identically one on the no-signaling
    /// polytope (the inequality is a consequence of normalization and
    /// no-signaling alone).
    pub fn is_constant_one(&self) -> bool {
        self.coords[0] == 1 && self.coords[1..].iter().all(|&c| c == 0)
    }
}

/// Dimensions and index arithmetic for quotient expansion.
struct QuotientSpace {
    n: usize,
    m: usize,
    d: usize,
    pows: Vec<usize>,
    dim: usize,
}

impl QuotientSpace {
    fn new(s: &Scenario) -> Self {
        let n = s.parties();
        let (m, d) = (s.settings(), s.outcomes());
        let width = 1 + m * (d - 1);
        let mut pows = vec![1usize; n + 1];
        for i in (0..n).rev() {
            pows[i] = pows[i + 1] * width;
        }
        let dim = pows[0];
        QuotientSpace { n, m, d, pows, dim }
    }

    #[inline]
    fn local_index(&self, x: u8, a: u8) -> usize {
        1 + (x as usize) * (self.d - 1) + a as usize
    }

    /// Add the expansion of `P(a|x)` into `vec`. Parties with the last
    /// outcome contribute `1 - sum_c P(c|x)`, expanded distributively.
    fn add_event(&self, vec: &mut [i64], a: &[u8], x: &[u8]) {
        let n = self.n;
        let mut choice = [0usize; 16];
        let choice = &mut choice[..n];
        loop {
            let mut idx = 0usize;
            let mut sign = 1i64;
            for i in 0..n {
                let local = if (a[i] as usize) < self.d - 1 {
                    self.local_index(x[i], a[i])
                } else if choice[i] == 0 {
                    0
                } else {
                    sign = -sign;
                    self.local_index(x[i], (choice[i] - 1) as u8)
                };
                idx += local * self.pows[i + 1];
            }
            vec[idx] += sign;
            // advance the odometer over per-party expansion choices
            let mut i = n;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                let max = if (a[i] as usize) < self.d - 1 { 0 } else { self.d - 1 };
                if choice[i] < max {
                    choice[i] += 1;
                    for c in choice.iter_mut().skip(i + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }

    fn vector_of(&self, events: &[Event]) -> Vec<i64> {
        let mut vec = vec![0i64; self.dim];
        for e in events {
            self.add_event(&mut vec, &e.outcomes, &e.settings);
        }
        vec
    }
}

/// Project the inequality's functional to the no-signaling quotient.
pub fn ns_quotient(i: &LoInequality) -> QuotientVector {
    let space = QuotientSpace::new(i.scenario());
    QuotientVector { coords: space.vector_of(i.events()) }
}

/// All permutations of `0..k`, lexicographic.
fn permutations(k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..k as u8).collect();
    loop {
        out.push(cur.clone());
        if k < 2 {
            return out;
        }
        let mut i = k - 1;
        while i > 0 && cur[i - 1] >= cur[i] {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        let mut j = k - 1;
        while cur[j] <= cur[i - 1] {
            j -= 1;
        }
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Relabelings of `0..keys.len()` that sort the values by their invariant
/// key; within tie groups all arrangements are produced, except that
/// zero-multiplicity values (empty keys) keep a single canonical
/// arrangement, since values that never occur cannot influence the matrix.
///
/// The key's first component is the multiplicity (descending, as the normal
/// form prescribes); the remaining components are relabeling-invariant
/// refinements that only split ties the multiplicity alone would leave.
fn tied_relabelings(keys: &[InvariantKey]) -> Vec<Vec<u8>> {
    let k = keys.len();
    let mut order: Vec<u8> = (0..k as u8).collect();
    order.sort_by(|&a, &b| {
        cmp_key(&keys[a as usize], &keys[b as usize]).then(a.cmp(&b))
    });
    let mut groups: Vec<(usize, Vec<u8>)> = Vec::new(); // (first new label, old labels)
    let mut pos = 0;
    for &l in &order {
        match groups.last_mut() {
            Some((_, labels)) if keys[labels[0] as usize] == keys[l as usize] => labels.push(l),
            _ => groups.push((pos, vec![l])),
        }
        pos += 1;
    }
    let mut results: Vec<Vec<u8>> = vec![vec![0u8; k]];
    for (start, labels) in &groups {
        let zero_group = keys[labels[0] as usize].multiplicity == 0;
        let arrangements: Vec<Vec<u8>> = if zero_group || labels.len() == 1 {
            vec![labels.clone()]
        } else {
            permutations(labels.len())
                .into_iter()
                .map(|p| p.iter().map(|&q| labels[q as usize]).collect())
                .collect()
        };
        let mut next = Vec::with_capacity(results.len() * arrangements.len());
        for r in &results {
            for arr in &arrangements {
                let mut r2 = r.clone();
                for (off, &old) in arr.iter().enumerate() {
                    r2[old as usize] = (start + off) as u8;
                }
                next.push(r2);
            }
        }
        results = next;
    }
    results
}

/// Invariant key of a setting or outcome value: its multiplicity plus the
/// sorted profile ids of the terms it occurs in.
#[derive(Clone, PartialEq, Eq, Debug)]
struct InvariantKey {
    multiplicity: u64,
    profile: Vec<u32>,
}

fn cmp_key(a: &InvariantKey, b: &InvariantKey) -> core::cmp::Ordering {
    b.multiplicity
        .cmp(&a.multiplicity)
        .then_with(|| a.profile.cmp(&b.profile))
}

/// Sorted rows `(a_1..a_n x_1..x_n)`, each packed into a `u128` with a fixed
/// digit width; matrices compare lexicographically.
type PackedMatrix = Vec<u128>;

struct Canonicalizer {
    n: usize,
    m: usize,
    d: usize,
    shift: u32,
    party_perms: Vec<Vec<u8>>,
}

impl Canonicalizer {
    fn new(s: &Scenario) -> Self {
        let n = s.parties();
        let (m, d) = (s.settings(), s.outcomes());
        let mut width = 1u32;
        while (1usize << width) < m.max(d) {
            width += 1;
        }
        assert!(2 * n as u32 * width <= 128, "event rows must pack into u128");
        Canonicalizer { n, m, d, shift: width, party_perms: permutations(n) }
    }

    fn pack_row(&self, ra: &[u8], rx: &[u8], perm: &[u8]) -> u128 {
        let mut row = 0u128;
        for &p in perm {
            row = row << self.shift | ra[p as usize] as u128;
        }
        for &p in perm {
            row = row << self.shift | rx[p as usize] as u128;
        }
        row
    }

    fn unpack(&self, matrix: &[u128]) -> Vec<Event> {
        let mask = (1u128 << self.shift) - 1;
        matrix
            .iter()
            .map(|&row| {
                let mut digits = vec![0u8; 2 * self.n];
                let mut r = row;
                for i in (0..2 * self.n).rev() {
                    digits[i] = (r & mask) as u8;
                    r >>= self.shift;
                }
                Event::new(digits[..self.n].to_vec(), digits[self.n..].to_vec())
            })
            .collect()
    }

    /// Normal form under (i)-(iii): settings and outcomes relabeled by
    /// descending multiplicity with all tied relabelings tried, all party
    /// permutations applied, rows sorted, and the lexicographically
    /// smallest matrix kept.
    ///
    /// Multiplicity ties are first split by relabeling-invariant occurrence
    /// profiles (iterated a few rounds); only genuinely symmetric values
    /// remain tied, which keeps the orbit enumeration small without
    /// changing which inequalities share a normal form.
    fn canonical(&self, events: &[Event]) -> Result<PackedMatrix, ClassifyError> {
        let r = events.len();
        let (n, m, d) = (self.n, self.m, self.d);
        let mut setting_mult = vec![vec![0u64; m]; n];
        let mut outcome_mult = vec![vec![vec![0u64; d]; m]; n];
        for e in events {
            for i in 0..n {
                setting_mult[i][e.settings[i] as usize] += 1;
                outcome_mult[i][e.settings[i] as usize][e.outcomes[i] as usize] += 1;
            }
        }
        let mut set_key: Vec<Vec<InvariantKey>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|x| InvariantKey { multiplicity: setting_mult[i][x], profile: Vec::new() })
                    .collect()
            })
            .collect();
        let mut out_key: Vec<Vec<Vec<InvariantKey>>> = (0..n)
            .map(|i| {
                (0..m)
                    .map(|x| {
                        (0..d)
                            .map(|a| InvariantKey {
                                multiplicity: outcome_mult[i][x][a],
                                profile: Vec::new(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for _round in 0..3 {
            // global ranks so profiles stay comparable across parties
            let mut set_rank = vec![vec![0u32; m]; n];
            let mut out_rank = vec![vec![vec![0u32; d]; m]; n];
            {
                let mut all: Vec<&InvariantKey> = Vec::with_capacity(n * m);
                for row in &set_key {
                    all.extend(row.iter());
                }
                all.sort_by(|a, b| cmp_key(a, b));
                all.dedup();
                for i in 0..n {
                    for x in 0..m {
                        set_rank[i][x] = all
                            .binary_search_by(|k| cmp_key(k, &set_key[i][x]))
                            .expect("present") as u32;
                    }
                }
                let mut all: Vec<&InvariantKey> = Vec::with_capacity(n * m * d);
                for row in &out_key {
                    for cell in row {
                        all.extend(cell.iter());
                    }
                }
                all.sort_by(|a, b| cmp_key(a, b));
                all.dedup();
                for i in 0..n {
                    for x in 0..m {
                        for a in 0..d {
                            out_rank[i][x][a] = all
                                .binary_search_by(|k| cmp_key(k, &out_key[i][x][a]))
                                .expect("present")
                                as u32;
                        }
                    }
                }
            }
            // term profiles, sorted per term for party-permutation invariance
            let mut profiles: Vec<Vec<(u32, u32)>> = events
                .iter()
                .map(|e| {
                    let mut p: Vec<(u32, u32)> = (0..n)
                        .map(|i| {
                            let x = e.settings[i] as usize;
                            (set_rank[i][x], out_rank[i][x][e.outcomes[i] as usize])
                        })
                        .collect();
                    p.sort_unstable();
                    p
                })
                .collect();
            let mut uniq = profiles.clone();
            uniq.sort_unstable();
            uniq.dedup();
            let pid: Vec<u32> = profiles
                .iter()
                .map(|p| uniq.binary_search(p).expect("present") as u32)
                .collect();
            profiles.clear();
            // refine keys by incident term profiles
            let mut changed = false;
            for i in 0..n {
                let mut new_set: Vec<Vec<u32>> = vec![Vec::new(); m];
                let mut new_out: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); d]; m];
                for (t, e) in events.iter().enumerate() {
                    let x = e.settings[i] as usize;
                    new_set[x].push(pid[t]);
                    new_out[x][e.outcomes[i] as usize].push(pid[t]);
                }
                for x in 0..m {
                    new_set[x].sort_unstable();
                    if set_key[i][x].profile != new_set[x] {
                        set_key[i][x].profile = core::mem::take(&mut new_set[x]);
                        changed = true;
                    }
                    for a in 0..d {
                        new_out[x][a].sort_unstable();
                        if out_key[i][x][a].profile != new_out[x][a] {
                            out_key[i][x][a].profile = core::mem::take(&mut new_out[x][a]);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let setting_opts: Vec<Vec<Vec<u8>>> =
            (0..n).map(|i| tied_relabelings(&set_key[i])).collect();
        let outcome_opts: Vec<Vec<Vec<Vec<u8>>>> = (0..n)
            .map(|i| (0..m).map(|x| tied_relabelings(&out_key[i][x])).collect())
            .collect();
        let mut variants: u64 = 1;
        for i in 0..n {
            variants = variants.saturating_mul(setting_opts[i].len() as u64);
            for x in 0..m {
                variants = variants.saturating_mul(outcome_opts[i][x].len() as u64);
            }
        }
        if variants.saturating_mul(self.party_perms.len() as u64) > ORBIT_LIMIT {
            return Err(ClassifyError::OrbitBudgetExceeded);
        }

        let slots = n + n * m;
        let slot_len = |s: usize| -> usize {
            if s < n {
                setting_opts[s].len()
            } else {
                outcome_opts[(s - n) / m][(s - n) % m].len()
            }
        };
        let mut choice = vec![0usize; slots];
        let mut ra = vec![0u8; r * n];
        let mut rx = vec![0u8; r * n];
        let mut rows: Vec<u128> = vec![0; r];
        let mut best: Option<PackedMatrix> = None;
        loop {
            for (ei, e) in events.iter().enumerate() {
                for i in 0..n {
                    let x = e.settings[i] as usize;
                    let sp = &setting_opts[i][choice[i]];
                    let op = &outcome_opts[i][x][choice[n + i * m + x]];
                    rx[ei * n + i] = sp[x];
                    ra[ei * n + i] = op[e.outcomes[i] as usize];
                }
            }
            for perm in &self.party_perms {
                for ei in 0..r {
                    rows[ei] =
                        self.pack_row(&ra[ei * n..(ei + 1) * n], &rx[ei * n..(ei + 1) * n], perm);
                }
                rows.sort_unstable();
                match &mut best {
                    None => best = Some(rows.clone()),
                    Some(b) => {
                        if rows.as_slice() < b.as_slice() {
                            b.copy_from_slice(&rows);
                        }
                    }
                }
            }
            let mut s = slots;
            loop {
                if s == 0 {
                    return Ok(best.expect("at least one variant"));
                }
                s -= 1;
                if choice[s] + 1 < slot_len(s) {
                    choice[s] += 1;
                    for c in choice.iter_mut().skip(s + 1) {
                        *c = 0;
                    }
                    break;
                }
            }
        }
    }
}

/// Normal form with respect to the relabeling equivalences (i)-(iii).
pub fn canonical_sym(i: &LoInequality) -> Result<LoInequality, ClassifyError> {
    let canon = Canonicalizer::new(i.scenario());
    let matrix = canon.canonical(i.events())?;
    Ok(LoInequality::from_events(*i.scenario(), canon.unpack(&matrix))?)
}

/// Lexicographically minimal quotient vector over the full (i)-(iii) group
/// acting on the inequality: a complete invariant for (i)-(iv) equivalence.
fn orbit_min_vector(
    space: &QuotientSpace,
    events: &[Event],
    budget: &mut SearchBudget,
) -> Result<Vec<i64>, ClassifyError> {
    let (n, m, d) = (space.n, space.m, space.d);
    let raw = space.vector_of(events);
    if raw[0] == 1 && raw[1..].iter().all(|&c| c == 0) {
        // the constant functional is fixed by every relabeling
        return Ok(raw);
    }
    let r = events.len();
    // outcome permutations only matter for (party, setting) pairs that occur
    let mut used = vec![vec![false; m]; n];
    for e in events {
        for i in 0..n {
            used[i][e.settings[i] as usize] = true;
        }
    }
    let party_perms = permutations(n);
    let m_perms = permutations(m);
    let d_perms = permutations(d);
    let used_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..m).map(move |x| (i, x)))
        .filter(|&(i, x)| used[i][x])
        .collect();
    let orbit = (party_perms.len() as u64)
        .saturating_mul((m_perms.len() as u64).saturating_pow(n as u32))
        .saturating_mul((d_perms.len() as u64).saturating_pow(used_pairs.len() as u32));
    if orbit > ORBIT_LIMIT {
        return Err(ClassifyError::OrbitBudgetExceeded);
    }

    let slots = n + used_pairs.len();
    let slot_len = |s: usize| if s < n { m_perms.len() } else { d_perms.len() };
    let mut op_index = vec![vec![usize::MAX; m]; n];
    for (k, &(i, x)) in used_pairs.iter().enumerate() {
        op_index[i][x] = n + k;
    }
    let mut choice = vec![0usize; slots];
    let mut ra = vec![0u8; r * n];
    let mut rx = vec![0u8; r * n];
    let mut pa = vec![0u8; n];
    let mut px = vec![0u8; n];
    let mut vec_buf = vec![0i64; space.dim];
    let mut best = raw;
    let mut polls = 0u32;
    loop {
        polls = polls.wrapping_add(1);
        if polls % 4096 == 0 {
            if let Some(hook) = budget.should_abort.as_mut() {
                if hook() {
                    return Err(ClassifyError::Search(SearchError::Aborted));
                }
            }
        }
        for (ei, e) in events.iter().enumerate() {
            for i in 0..n {
                let x = e.settings[i] as usize;
                rx[ei * n + i] = m_perms[choice[i]][x];
                ra[ei * n + i] = d_perms[choice[op_index[i][x]]][e.outcomes[i] as usize];
            }
        }
        for perm in &party_perms {
            vec_buf.iter_mut().for_each(|v| *v = 0);
            for ei in 0..r {
                for (slot, &p) in perm.iter().enumerate() {
                    pa[slot] = ra[ei * n + p as usize];
                    px[slot] = rx[ei * n + p as usize];
                }
                space.add_event(&mut vec_buf, &pa, &px);
            }
            if vec_buf.as_slice() < best.as_slice() {
                best.copy_from_slice(&vec_buf);
            }
        }
        let mut s = slots;
        loop {
            if s == 0 {
                return Ok(best);
            }
            s -= 1;
            if choice[s] + 1 < slot_len(s) {
                choice[s] += 1;
                for c in choice.iter_mut().skip(s + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// An equivalence class under (i)-(iv).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EquivalenceClass {
    /// The lexicographically first normal form in the class.
    pub representative: LoInequality,
    /// Number of input inequalities that landed in the class.
    pub members: u64,
}

/// Partition inequalities (all on one scenario) into equivalence classes
/// under the full group generated by (i)-(iv). Two inequalities are
/// equivalent iff their orbit-minimal quotient vectors coincide. Classes
/// come out sorted by term count, then by the representative's matrix.
pub fn classify(
    ineqs: &[LoInequality],
    budget: &mut SearchBudget,
) -> Result<Vec<EquivalenceClass>, ClassifyError> {
    let Some(first) = ineqs.first() else {
        return Ok(Vec::new());
    };
    let scenario = *first.scenario();
    if ineqs.iter().any(|i| i.scenario() != &scenario) {
        return Err(ClassifyError::MixedScenarios);
    }
    let canon = Canonicalizer::new(&scenario);
    let mut forms: BTreeMap<PackedMatrix, u64> = BTreeMap::new();
    for i in ineqs {
        *forms.entry(canon.canonical(i.events())?).or_insert(0) += 1;
    }
    group_forms(&scenario, &canon, forms, budget)
}

fn group_forms(
    scenario: &Scenario,
    canon: &Canonicalizer,
    forms: BTreeMap<PackedMatrix, u64>,
    budget: &mut SearchBudget,
) -> Result<Vec<EquivalenceClass>, ClassifyError> {
    let space = QuotientSpace::new(scenario);
    // forms iterate in normal-form order, so the first form per quotient
    // orbit is the class representative
    let mut classes: BTreeMap<Vec<i64>, (PackedMatrix, u64)> = BTreeMap::new();
    for (key, count) in forms {
        let events = canon.unpack(&key);
        let minvec = orbit_min_vector(&space, &events, budget)?;
        match classes.get_mut(&minvec) {
            Some((rep, members)) => {
                if key < *rep {
                    *rep = key;
                }
                *members += count;
            }
            None => {
                classes.insert(minvec, (key, count));
            }
        }
    }
    let mut out: Vec<EquivalenceClass> = classes
        .into_values()
        .map(|(key, members)| -> Result<EquivalenceClass, ClassifyError> {
            let events = canon.unpack(&key);
            Ok(EquivalenceClass {
                representative: LoInequality::from_events(*scenario, events)?,
                members,
            })
        })
        .collect::<Result<_, _>>()?;
    out.sort_by(|a, b| {
        (a.representative.terms(), a.representative.events())
            .cmp(&(b.representative.terms(), b.representative.events()))
    });
    Ok(out)
}

/// Enumerate the nontrivial inequality classes of a scenario: all maximal
/// cliques of the orthogonality graph, classified under (i)-(iv), with the
/// classes whose no-signaling maximum is exactly one dropped (those are
/// consequences of normalization and no-signaling alone).
pub fn enumerate_classes(
    s: &Scenario,
    budget: &mut SearchBudget,
) -> Result<Vec<EquivalenceClass>, ClassifyError> {
    let g = orthogonality_graph(s)?;
    let labels: Vec<Event> = g.labels().expect("orthogonality graph is labeled").to_vec();
    let canon = Canonicalizer::new(s);
    let space = QuotientSpace::new(s);
    let mut forms: BTreeMap<PackedMatrix, u64> = BTreeMap::new();
    let mut vec_buf = vec![0i64; space.dim];
    let mut canon_err = None;
    let mut events_buf: Vec<Event> = Vec::new();
    visit_maximal_cliques(&g, budget, |c| {
        if canon_err.is_some() {
            return;
        }
        events_buf.clear();
        events_buf.extend(c.iter().map(|&v| labels[v].clone()));
        vec_buf.iter_mut().for_each(|v| *v = 0);
        for e in &events_buf {
            space.add_event(&mut vec_buf, &e.outcomes, &e.settings);
        }
        if vec_buf[0] == 1 && vec_buf[1..].iter().all(|&c| c == 0) {
            // identically one on the polytope: lands in the trivial class
            return;
        }
        match canon.canonical(&events_buf) {
            Ok(key) => *forms.entry(key).or_insert(0) += 1,
            Err(e) => canon_err = Some(e),
        }
    })?;
    if let Some(e) = canon_err {
        return Err(e);
    }
    let classes = group_forms(s, &canon, forms, budget)?;
    // drop remaining trivial classes by the operational criterion
    let mut nontrivial = Vec::new();
    for c in classes {
        if c.representative.ns_max()? != Rational::one() {
            nontrivial.push(c);
        }
    }
    Ok(nontrivial)
}
