//! Wiring protocols: grouped parties of several box copies feed outcomes
//! into later measurement choices and announce joint outcomes, producing a
//! new box. Covers static and dynamic deterministic wirings via explicit
//! lookup tables, and stochastic wirings by adjoining a classical box as a
//! randomness source. Also the inequality-expansion step of the closure
//! argument: an inequality on the wired scenario pulls back to one on the
//! tensor-power scenario with the same value.

use alloc::{collections::BTreeMap, vec, vec::Vec};
use core::fmt;

use num_traits::Zero;

use crate::boxes::{BoxError, LhvModel, NsBox};
use crate::inequalities::{InequalityError, LoInequality};
use crate::scenario::{Event, Scenario, ScenarioError};
use crate::Rational;

/// Lookup key: the group input together with the outcomes obtained so far,
/// in temporal order.
pub type HistoryKey = (u8, Vec<u8>);

/// One group of parties and its subprotocol. The party measuring at step
/// `t` may depend on the group input and all outcomes seen so far (dynamic
/// wirings); so may its measurement choice. After all members have
/// measured, the output map announces the group outcome.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WiringGroup {
    /// Global party indices (into the `r*n` parties of the box power).
    pub parties: Vec<usize>,
    /// `(y, outcomes-so-far) -> next party` (a member of `parties`).
    pub order: BTreeMap<HistoryKey, usize>,
    /// `(y, outcomes-so-far) -> setting` for that party.
    pub inputs: BTreeMap<HistoryKey, u8>,
    /// `(y, all outcomes) -> group outcome`.
    pub output: BTreeMap<HistoryKey, u8>,
}

/// A wiring of `copies` copies of a box over `base`, producing a box with
/// one party per group, `wired_inputs` settings and `wired_outputs`
/// outcomes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WiringProtocol {
    pub base: Scenario,
    pub copies: usize,
    pub wired_inputs: usize,
    pub wired_outputs: usize,
    pub groups: Vec<WiringGroup>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WiringError {
    /// The box does not live on the protocol's base scenario.
    ScenarioMismatch,
    /// Groups do not partition the parties of the box power.
    InvalidGroups,
    /// A lookup table lacks an entry for a reachable history.
    MissingEntry { group: usize, input: u8, history: Vec<u8>, table: &'static str },
    /// The order map names a party outside the group or revisits one.
    InvalidOrder { group: usize, party: usize },
    /// A table value is outside the declared arity.
    ArityMismatch,
    /// Expansion produced a non-orthogonal event set; this would contradict
    /// the closure theorem, so it is reported as an internal error.
    NonOrthogonalExpansion,
    Scenario(ScenarioError),
    Box_(BoxError),
    Inequality(InequalityError),
}

impl fmt::Display for WiringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WiringError::ScenarioMismatch => write!(f, "box does not match protocol base"),
            WiringError::InvalidGroups => write!(f, "groups must partition the parties"),
            WiringError::MissingEntry { group, input, history, table } => write!(
                f,
                "group {group}: {table} table lacks entry for input {input}, history {history:?}"
            ),
            WiringError::InvalidOrder { group, party } => {
                write!(f, "group {group}: order map visits party {party} invalidly")
            }
            WiringError::ArityMismatch => write!(f, "table value outside declared arity"),
            WiringError::NonOrthogonalExpansion => {
                write!(f, "expanded events are not pairwise orthogonal")
            }
            WiringError::Scenario(e) => write!(f, "{e}"),
            WiringError::Box_(e) => write!(f, "{e}"),
            WiringError::Inequality(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for WiringError {}

impl From<ScenarioError> for WiringError {
    fn from(e: ScenarioError) -> Self {
        WiringError::Scenario(e)
    }
}
impl From<BoxError> for WiringError {
    fn from(e: BoxError) -> Self {
        WiringError::Box_(e)
    }
}
impl From<InequalityError> for WiringError {
    fn from(e: InequalityError) -> Self {
        WiringError::Inequality(e)
    }
}

/// A complete run of one group's subprotocol: which setting and outcome
/// each member ended up with, and the announced group outcome.
#[derive(Clone, Debug)]
struct History {
    /// `(global party, setting, outcome)`, one entry per group member.
    assignment: Vec<(usize, u8, u8)>,
    outcome: u8,
}

impl WiringProtocol {
    /// Trivial wiring: one copy, each party its own group, identity input
    /// and output maps. Wiring any box with it returns the box unchanged.
    pub fn identity(base: Scenario) -> WiringProtocol {
        let (m, d) = (base.settings(), base.outcomes());
        let mut groups = Vec::new();
        for p in 0..base.parties() {
            let mut order = BTreeMap::new();
            let mut inputs = BTreeMap::new();
            let mut output = BTreeMap::new();
            for y in 0..m as u8 {
                order.insert((y, Vec::new()), p);
                inputs.insert((y, Vec::new()), y);
                for a in 0..d as u8 {
                    output.insert((y, vec![a]), a);
                }
            }
            groups.push(WiringGroup { parties: vec![p], order, inputs, output });
        }
        WiringProtocol { base, copies: 1, wired_inputs: m, wired_outputs: d, groups }
    }

    /// Local wiring that restricts every party to the listed settings: the
    /// wired box has `keep.len()` settings per party.
    pub fn restrict_settings(base: Scenario, keep: &[u8]) -> Result<WiringProtocol, WiringError> {
        if keep.is_empty() || keep.iter().any(|&x| x as usize >= base.settings()) {
            return Err(WiringError::ArityMismatch);
        }
        let d = base.outcomes();
        let mut proto = WiringProtocol::identity(base);
        proto.wired_inputs = keep.len();
        for g in &mut proto.groups {
            let p = g.parties[0];
            g.order.clear();
            g.inputs.clear();
            g.output.clear();
            for (y, &x) in keep.iter().enumerate() {
                g.order.insert((y as u8, Vec::new()), p);
                g.inputs.insert((y as u8, Vec::new()), x);
                for a in 0..d as u8 {
                    g.output.insert((y as u8, vec![a]), a);
                }
            }
        }
        Ok(proto)
    }

    /// Local wiring that merges outcomes through `map` (old outcome ->
    /// new outcome with `new_outcomes` values per setting).
    pub fn coarse_grain(
        base: Scenario,
        map: &[u8],
        new_outcomes: usize,
    ) -> Result<WiringProtocol, WiringError> {
        if map.len() != base.outcomes()
            || new_outcomes < 2
            || map.iter().any(|&b| b as usize >= new_outcomes)
        {
            return Err(WiringError::ArityMismatch);
        }
        let mut proto = WiringProtocol::identity(base);
        proto.wired_outputs = new_outcomes;
        for g in &mut proto.groups {
            for (_, out) in g.output.iter_mut() {
                *out = map[*out as usize];
            }
        }
        Ok(proto)
    }

    /// Scenario of the wired box.
    pub fn wired_scenario(&self) -> Result<Scenario, ScenarioError> {
        Scenario::new(self.groups.len(), self.wired_inputs, self.wired_outputs)
    }

    fn check_partition(&self) -> Result<(), WiringError> {
        let total = self.base.parties() * self.copies;
        let mut seen = vec![false; total];
        for g in &self.groups {
            for &p in &g.parties {
                if p >= total || core::mem::replace(&mut seen[p], true) {
                    return Err(WiringError::InvalidGroups);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(WiringError::InvalidGroups)
        }
    }

    /// Depth-first enumeration of all complete runs of group `gi` under
    /// group input `y`. Histories come out in outcome-lexicographic order.
    fn histories(&self, gi: usize, y: u8) -> Result<Vec<History>, WiringError> {
        let group = &self.groups[gi];
        let l = group.parties.len();
        let d = self.base.outcomes();
        let mut runs = Vec::new();
        let mut outcomes: Vec<u8> = Vec::with_capacity(l);
        let mut assignment: Vec<(usize, u8, u8)> = Vec::with_capacity(l);
        self.walk(gi, y, l, d, &mut outcomes, &mut assignment, &mut runs)?;
        Ok(runs)
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        gi: usize,
        y: u8,
        l: usize,
        d: usize,
        outcomes: &mut Vec<u8>,
        assignment: &mut Vec<(usize, u8, u8)>,
        runs: &mut Vec<History>,
    ) -> Result<(), WiringError> {
        let group = &self.groups[gi];
        if outcomes.len() == l {
            let out = *group.output.get(&(y, outcomes.clone())).ok_or_else(|| {
                WiringError::MissingEntry { group: gi, input: y, history: outcomes.clone(), table: "output" }
            })?;
            if out as usize >= self.wired_outputs {
                return Err(WiringError::ArityMismatch);
            }
            let mut assignment = assignment.clone();
            assignment.sort_unstable_by_key(|&(p, _, _)| p);
            runs.push(History { assignment, outcome: out });
            return Ok(());
        }
        let key = (y, outcomes.clone());
        let party = *group.order.get(&key).ok_or_else(|| WiringError::MissingEntry {
            group: gi,
            input: y,
            history: outcomes.clone(),
            table: "order",
        })?;
        if !group.parties.contains(&party) || assignment.iter().any(|&(p, _, _)| p == party) {
            return Err(WiringError::InvalidOrder { group: gi, party });
        }
        let setting = *group.inputs.get(&key).ok_or_else(|| WiringError::MissingEntry {
            group: gi,
            input: y,
            history: outcomes.clone(),
            table: "input",
        })?;
        if setting as usize >= self.base.settings() {
            return Err(WiringError::ArityMismatch);
        }
        for a in 0..d as u8 {
            outcomes.push(a);
            assignment.push((party, setting, a));
            self.walk(gi, y, l, d, outcomes, assignment, runs)?;
            outcomes.pop();
            assignment.pop();
        }
        Ok(())
    }
}

/// Probability of a joint event of the `r`-fold power of `b`, computed
/// factor-wise from the base table.
fn power_prob(b: &NsBox, copies: usize, a: &[u8], x: &[u8]) -> Rational {
    let s = b.scenario();
    let n = s.parties();
    let mut p = Rational::from_integer(1.into());
    for c in 0..copies {
        let idx = s
            .index_of(&a[c * n..(c + 1) * n], &x[c * n..(c + 1) * n])
            .expect("validated digits");
        let factor = b.prob_index(idx);
        if factor.is_zero() {
            return Rational::zero();
        }
        p *= factor;
    }
    p
}

/// The wired box: group outcomes are announced according to the protocol,
/// summing the power-box probabilities over all runs consistent with each
/// wired event.
pub fn wire(b: &NsBox, p: &WiringProtocol) -> Result<NsBox, WiringError> {
    if b.scenario() != &p.base {
        return Err(WiringError::ScenarioMismatch);
    }
    p.check_partition()?;
    let wired = p.wired_scenario()?;
    let s_groups = p.groups.len();
    let total_parties = p.base.parties() * p.copies;
    // all runs per (group, input)
    let mut runs: Vec<Vec<Vec<History>>> = Vec::with_capacity(s_groups);
    for gi in 0..s_groups {
        let mut per_y = Vec::with_capacity(p.wired_inputs);
        for y in 0..p.wired_inputs as u8 {
            per_y.push(p.histories(gi, y)?);
        }
        runs.push(per_y);
    }
    let mut table: BTreeMap<usize, Rational> = BTreeMap::new();
    let mut a = vec![0u8; total_parties];
    let mut x = vec![0u8; total_parties];
    for ctx in 0..wired.context_count() {
        let y = crate::boxes::decode_tuple(ctx, s_groups, p.wired_inputs);
        // cartesian product of group runs
        let mut combo = vec![0usize; s_groups];
        'combos: loop {
            let mut wired_outcomes = vec![0u8; s_groups];
            for gi in 0..s_groups {
                let h = &runs[gi][y[gi] as usize][combo[gi]];
                wired_outcomes[gi] = h.outcome;
                for &(party, setting, outcome) in &h.assignment {
                    a[party] = outcome;
                    x[party] = setting;
                }
            }
            let prob = power_prob(b, p.copies, &a, &x);
            if !prob.is_zero() {
                let idx = wired.index_of(&wired_outcomes, &y).expect("in range");
                *table.entry(idx).or_insert_with(Rational::zero) += prob;
            }
            for gi in (0..s_groups).rev() {
                combo[gi] += 1;
                if combo[gi] < runs[gi][y[gi] as usize].len() {
                    continue 'combos;
                }
                combo[gi] = 0;
                if gi == 0 {
                    break 'combos;
                }
            }
        }
    }
    let entries = table
        .into_iter()
        .map(|(idx, prob)| (wired.event(idx), prob))
        .collect::<Vec<_>>();
    Ok(NsBox::from_entries(wired, entries)?)
}

/// Pull an inequality on the wired scenario back to the tensor-power
/// scenario: every term is replaced by the events of all runs consistent
/// with it. The result is asserted to be pairwise orthogonal (the content
/// of the closure argument) and satisfies
/// `expanded(b^r) = original(wire(b, p))` exactly.
pub fn expand_inequality(
    i: &LoInequality,
    p: &WiringProtocol,
) -> Result<LoInequality, WiringError> {
    p.check_partition()?;
    let wired = p.wired_scenario()?;
    if i.scenario() != &wired {
        return Err(WiringError::ScenarioMismatch);
    }
    let s_groups = p.groups.len();
    let total_parties = p.base.parties() * p.copies;
    let power_scenario = p.base.power(p.copies)?;
    let mut runs: Vec<Vec<Vec<History>>> = Vec::with_capacity(s_groups);
    for gi in 0..s_groups {
        let mut per_y = Vec::with_capacity(p.wired_inputs);
        for y in 0..p.wired_inputs as u8 {
            per_y.push(p.histories(gi, y)?);
        }
        runs.push(per_y);
    }
    let mut events = Vec::new();
    for term in i.events() {
        let y = &term.settings;
        let b_out = &term.outcomes;
        // runs of each group matching the announced outcome
        let matching: Vec<Vec<&History>> = (0..s_groups)
            .map(|gi| {
                runs[gi][y[gi] as usize]
                    .iter()
                    .filter(|h| h.outcome == b_out[gi])
                    .collect()
            })
            .collect();
        if matching.iter().any(|v| v.is_empty()) {
            continue; // the wired event has probability zero for every box
        }
        let mut combo = vec![0usize; s_groups];
        'combos: loop {
            let mut a = vec![0u8; total_parties];
            let mut x = vec![0u8; total_parties];
            for gi in 0..s_groups {
                for &(party, setting, outcome) in &matching[gi][combo[gi]].assignment {
                    a[party] = outcome;
                    x[party] = setting;
                }
            }
            events.push(Event::new(a, x));
            for gi in (0..s_groups).rev() {
                combo[gi] += 1;
                if combo[gi] < matching[gi].len() {
                    continue 'combos;
                }
                combo[gi] = 0;
                if gi == 0 {
                    break 'combos;
                }
            }
        }
    }
    LoInequality::from_events(power_scenario, events)
        .map_err(|_| WiringError::NonOrthogonalExpansion)
}

/// A stochastic wiring: a deterministic protocol over `copies` of the box
/// extended by a classical box built from a hidden-variable model (shared
/// or local randomness).
#[derive(Clone, Debug)]
pub struct StochasticWiring {
    pub copies: usize,
    pub local_scenario: Scenario,
    pub local_model: LhvModel,
    /// Protocol over the extended system; its base must be the
    /// `copies * n + n_local`-party scenario and its own copy count one.
    pub base: WiringProtocol,
}

/// Wire `b`'s power together with the classical randomness box.
pub fn stochastic_wire(b: &NsBox, sw: &StochasticWiring) -> Result<NsBox, WiringError> {
    let local = sw.local_model.to_box(sw.local_scenario)?;
    let power = b.tensor_power(sw.copies)?;
    let extended = power.tensor(&local)?;
    if sw.base.copies != 1 || &sw.base.base != extended.scenario() {
        return Err(WiringError::ScenarioMismatch);
    }
    wire(&extended, &sw.base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::BoxVerdict;
    use crate::ratio;

    #[test]
    fn identity_wiring_returns_the_box() {
        let pr = NsBox::pr();
        let p = WiringProtocol::identity(*pr.scenario());
        let wired = wire(&pr, &p).unwrap();
        assert_eq!(wired, pr);
    }

    #[test]
    fn restricting_settings_shrinks_the_scenario() {
        // a (2,3,2) box: uniform, then keep settings {0, 2}
        let s = Scenario::new(2, 3, 2).unwrap();
        let b = NsBox::uniform(s);
        let p = WiringProtocol::restrict_settings(s, &[0, 2]).unwrap();
        let wired = wire(&b, &p).unwrap();
        assert_eq!(wired.scenario(), &Scenario::new(2, 2, 2).unwrap());
        assert_eq!(wired.validate().unwrap(), BoxVerdict::Ok);
    }

    #[test]
    fn coarse_graining_merges_outcomes() {
        // (2,2,4) uniform box, outcomes {0,1} -> 0 and {2,3} -> 1
        let s = Scenario::new(2, 2, 4).unwrap();
        let b = NsBox::uniform(s);
        let p = WiringProtocol::coarse_grain(s, &[0, 0, 1, 1], 2).unwrap();
        let wired = wire(&b, &p).unwrap();
        assert_eq!(wired.scenario(), &Scenario::new(2, 2, 2).unwrap());
        assert_eq!(wired.validate().unwrap(), BoxVerdict::Ok);
        // each merged outcome pair carries 2/16 + ... = 1/4
        assert_eq!(
            wired.prob(&Event::new(vec![0, 0], vec![0, 0])).unwrap(),
            ratio(1, 4)
        );
    }

    /// Grouping both ends of one PR copy and feeding the first outcome into
    /// the second measurement: a classic sequential wiring.
    fn sequential_pr_protocol() -> WiringProtocol {
        let base = Scenario::new(2, 2, 2).unwrap();
        let mut order = BTreeMap::new();
        let mut inputs = BTreeMap::new();
        let mut output = BTreeMap::new();
        for y in 0..2u8 {
            order.insert((y, vec![]), 0usize);
            inputs.insert((y, vec![]), y);
            for a0 in 0..2u8 {
                order.insert((y, vec![a0]), 1usize);
                inputs.insert((y, vec![a0]), a0);
                for a1 in 0..2u8 {
                    output.insert((y, vec![a0, a1]), a1);
                }
            }
        }
        WiringProtocol {
            base,
            copies: 1,
            wired_inputs: 2,
            wired_outputs: 2,
            groups: vec![WiringGroup { parties: vec![0, 1], order, inputs, output }],
        }
    }

    #[test]
    fn sequential_wiring_is_a_single_party_box() {
        let wired = wire(&NsBox::pr(), &sequential_pr_protocol()).unwrap();
        assert_eq!(wired.scenario(), &Scenario::new(1, 2, 2).unwrap());
        assert_eq!(wired.validate().unwrap(), BoxVerdict::Ok);
    }

    #[test]
    fn expansion_of_identity_wiring_is_identity() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let p = WiringProtocol::identity(s);
        let i = LoInequality::from_events(
            s,
            vec![Event::new(vec![0, 0], vec![0, 0]), Event::new(vec![1, 0], vec![0, 0])],
        )
        .unwrap();
        let expanded = expand_inequality(&i, &p).unwrap();
        assert_eq!(&expanded, &i);
    }

    #[test]
    fn expansion_value_matches_wired_value() {
        let pr = NsBox::pr();
        let p = sequential_pr_protocol();
        let wired = wire(&pr, &p).unwrap();
        // all maximal cliques of the wired 1-party scenario: each setting's
        // outcome pair
        let ws = *wired.scenario();
        for x in 0..2u8 {
            let i = LoInequality::from_events(
                ws,
                vec![Event::new(vec![0], vec![x]), Event::new(vec![1], vec![x])],
            )
            .unwrap();
            let expanded = expand_inequality(&i, &p).unwrap();
            assert_eq!(
                expanded.evaluate(&pr).unwrap(),
                i.evaluate(&wired).unwrap()
            );
        }
    }

    #[test]
    fn stochastic_wiring_with_point_mass_reduces_to_deterministic() {
        // local box: one party, always outputs 0; groups: {A, coin}, {B};
        // the coin is read first but ignored
        let base = Scenario::new(2, 2, 2).unwrap();
        let local_scenario = Scenario::new(1, 2, 2).unwrap();
        let local_model = LhvModel {
            weights: vec![ratio(1, 1)],
            strategies: vec![vec![vec![0, 0]]],
        };
        // extended system: parties 0,1 = PR; party 2 = coin
        let ext = Scenario::new(3, 2, 2).unwrap();
        let mut g0_order = BTreeMap::new();
        let mut g0_inputs = BTreeMap::new();
        let mut g0_output = BTreeMap::new();
        for y in 0..2u8 {
            g0_order.insert((y, vec![]), 2usize);
            g0_inputs.insert((y, vec![]), 0u8);
            for c in 0..2u8 {
                g0_order.insert((y, vec![c]), 0usize);
                g0_inputs.insert((y, vec![c]), y);
                for a in 0..2u8 {
                    g0_output.insert((y, vec![c, a]), a);
                }
            }
        }
        let mut g1_order = BTreeMap::new();
        let mut g1_inputs = BTreeMap::new();
        let mut g1_output = BTreeMap::new();
        for y in 0..2u8 {
            g1_order.insert((y, vec![]), 1usize);
            g1_inputs.insert((y, vec![]), y);
            for a in 0..2u8 {
                g1_output.insert((y, vec![a]), a);
            }
        }
        let sw = StochasticWiring {
            copies: 1,
            local_scenario,
            local_model,
            base: WiringProtocol {
                base: ext,
                copies: 1,
                wired_inputs: 2,
                wired_outputs: 2,
                groups: vec![
                    WiringGroup {
                        parties: vec![0, 2],
                        order: g0_order,
                        inputs: g0_inputs,
                        output: g0_output,
                    },
                    WiringGroup {
                        parties: vec![1],
                        order: g1_order,
                        inputs: g1_inputs,
                        output: g1_output,
                    },
                ],
            },
        };
        let pr = NsBox::pr();
        let wired = stochastic_wire(&pr, &sw).unwrap();
        assert_eq!(wired, pr);
    }

    #[test]
    fn shared_coin_mixes_deterministic_post_processings() {
        // two-party shared uniform coin; group i = {party i of a
        // deterministic box, coin reader i}; outcome flipped when the coin
        // shows one. The wired box is the even mixture of the two
        // deterministic boxes.
        let base = Scenario::new(2, 2, 2).unwrap();
        let local_scenario = Scenario::new(2, 2, 2).unwrap();
        let local_model = LhvModel {
            weights: vec![ratio(1, 2), ratio(1, 2)],
            strategies: vec![
                vec![vec![0, 0], vec![0, 0]],
                vec![vec![1, 1], vec![1, 1]],
            ],
        };
        let det = NsBox::deterministic(base, &[0, 0]).unwrap();
        // extended: 0,1 = det box; 2,3 = coin halves
        let ext = Scenario::new(4, 2, 2).unwrap();
        let mk_group = |box_party: usize, coin_party: usize| {
            let mut order = BTreeMap::new();
            let mut inputs = BTreeMap::new();
            let mut output = BTreeMap::new();
            for y in 0..2u8 {
                order.insert((y, vec![]), coin_party);
                inputs.insert((y, vec![]), 0u8);
                for c in 0..2u8 {
                    order.insert((y, vec![c]), box_party);
                    inputs.insert((y, vec![c]), y);
                    for a in 0..2u8 {
                        output.insert((y, vec![c, a]), a ^ c);
                    }
                }
            }
            WiringGroup { parties: vec![box_party, coin_party], order, inputs, output }
        };
        let sw = StochasticWiring {
            copies: 1,
            local_scenario,
            local_model,
            base: WiringProtocol {
                base: ext,
                copies: 1,
                wired_inputs: 2,
                wired_outputs: 2,
                groups: vec![mk_group(0, 2), mk_group(1, 3)],
            },
        };
        let wired = stochastic_wire(&det, &sw).unwrap();
        let expected = det
            .mix(&NsBox::deterministic(base, &[1, 1]).unwrap(), &ratio(1, 2))
            .unwrap();
        assert_eq!(wired, expected);
    }

    #[test]
    fn missing_table_entries_are_reported() {
        let mut p = sequential_pr_protocol();
        p.groups[0].output.clear();
        let err = wire(&NsBox::pr(), &p).unwrap_err();
        assert!(matches!(err, WiringError::MissingEntry { table: "output", .. }));
    }
}
