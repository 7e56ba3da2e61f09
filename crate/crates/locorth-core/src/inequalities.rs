//! Orthogonality inequalities: sums of probabilities of pairwise-orthogonal
//! events, bounded by one. Construction from cliques, evaluation against
//! boxes, optimality (maximality of the underlying clique), completion to
//! maximal form, the level-`k` verdict procedure for tensor powers, and the
//! exact no-signaling maximum via rational LP.

use alloc::{vec, vec::Vec};
use core::fmt;

use num_traits::{One, Zero};

use crate::boxes::{BoxError, NsBox};
use crate::lp::{self, Constraint, LpOutcome, Relation};
use crate::scenario::{
    are_orthogonal, orthogonality_graph, Event, Graph, GraphError, Scenario, ScenarioError,
};
use crate::search::{
    is_maximal_clique, max_weighted_clique, visit_maximal_cliques, SearchBudget, SearchError,
    WeightedGraph,
};
use crate::Rational;

/// Number of events above which [`LoInequality::ns_max`] refuses to build
/// the LP.
pub const LP_VARIABLE_LIMIT: usize = 4096;

/// A set of pairwise-orthogonal events, read as the inequality
/// `sum_e P(e) <= 1` (all coefficients one, bound one implicit).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LoInequality {
    scenario: Scenario,
    /// sorted by mixed-radix event index
    events: Vec<Event>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum InequalityError {
    /// Two of the supplied events are not orthogonal.
    NotAClique { first: Event, second: Event },
    /// Inequality and box (or graph) live on different scenarios.
    ScenarioMismatch,
    /// The LP would exceed [`LP_VARIABLE_LIMIT`] variables.
    LpSizeLimit { variables: usize },
    /// The graph passed to `from_clique` has no event labels.
    UnlabeledGraph,
    VertexOutOfRange,
    Scenario(ScenarioError),
    Graph(GraphError),
    Box_(BoxError),
    Search(SearchError),
}

impl fmt::Display for InequalityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InequalityError::NotAClique { first, second } => {
                write!(f, "events {first} and {second} are not orthogonal")
            }
            InequalityError::ScenarioMismatch => write!(f, "scenario mismatch"),
            InequalityError::LpSizeLimit { variables } => {
                write!(f, "LP with {variables} variables exceeds the size limit")
            }
            InequalityError::UnlabeledGraph => write!(f, "graph carries no event labels"),
            InequalityError::VertexOutOfRange => write!(f, "vertex out of range"),
            InequalityError::Scenario(e) => write!(f, "{e}"),
            InequalityError::Graph(e) => write!(f, "{e}"),
            InequalityError::Box_(e) => write!(f, "{e}"),
            InequalityError::Search(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for InequalityError {}

impl From<ScenarioError> for InequalityError {
    fn from(e: ScenarioError) -> Self {
        InequalityError::Scenario(e)
    }
}
impl From<GraphError> for InequalityError {
    fn from(e: GraphError) -> Self {
        InequalityError::Graph(e)
    }
}
impl From<BoxError> for InequalityError {
    fn from(e: BoxError) -> Self {
        InequalityError::Box_(e)
    }
}
impl From<SearchError> for InequalityError {
    fn from(e: SearchError) -> Self {
        InequalityError::Search(e)
    }
}

impl LoInequality {
    /// Build from events, verifying pairwise orthogonality (the first
    /// offending pair is reported).
    pub fn from_events(
        scenario: Scenario,
        events: Vec<Event>,
    ) -> Result<Self, InequalityError> {
        for (i, e) in events.iter().enumerate() {
            for f in &events[i + 1..] {
                if !are_orthogonal(&scenario, e, f)? {
                    return Err(InequalityError::NotAClique {
                        first: e.clone(),
                        second: f.clone(),
                    });
                }
            }
        }
        let mut events = events;
        events.sort_by_key(|e| scenario.index_of(&e.outcomes, &e.settings).unwrap_or(usize::MAX));
        Ok(LoInequality { scenario, events })
    }

    /// Inequality whose events are the labels of the clique `c` in a
    /// labeled orthogonality graph.
    pub fn from_clique(
        graph: &Graph,
        scenario: Scenario,
        c: &[usize],
    ) -> Result<Self, InequalityError> {
        let labels = graph.labels().ok_or(InequalityError::UnlabeledGraph)?;
        let mut events = Vec::with_capacity(c.len());
        for &v in c {
            if v >= labels.len() {
                return Err(InequalityError::VertexOutOfRange);
            }
            events.push(labels[v].clone());
        }
        Self::from_events(scenario, events)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Events in mixed-radix index order.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn terms(&self) -> usize {
        self.events.len()
    }

    pub fn event_indices(&self) -> Vec<usize> {
        self.events
            .iter()
            .map(|e| self.scenario.index_of(&e.outcomes, &e.settings).expect("validated"))
            .collect()
    }

    /// Exact left-hand-side value of the inequality at `b`.
    pub fn evaluate(&self, b: &NsBox) -> Result<Rational, InequalityError> {
        if b.scenario() != &self.scenario {
            return Err(InequalityError::ScenarioMismatch);
        }
        let mut sum = Rational::zero();
        for e in &self.events {
            sum += b.prob(e)?;
        }
        Ok(sum)
    }

    /// True iff the event set is a maximal clique of the orthogonality
    /// graph of its scenario (no further term can be added).
    pub fn is_optimal(&self) -> Result<bool, InequalityError> {
        let g = orthogonality_graph(&self.scenario)?;
        Ok(is_maximal_clique(&g, &self.event_indices()))
    }

    /// All maximal cliques of the orthogonality graph containing this
    /// clique, as inequalities, in deterministic (sorted) order.
    pub fn complete_to_maximal(
        &self,
        budget: &mut SearchBudget,
    ) -> Result<Vec<LoInequality>, InequalityError> {
        let g = orthogonality_graph(&self.scenario)?;
        let own = self.event_indices();
        // vertices adjacent to every member
        let mut common: Vec<usize> = (0..g.vertex_count())
            .filter(|&v| !own.contains(&v) && own.iter().all(|&u| g.has_edge(u, v)))
            .collect();
        common.sort_unstable();
        if common.is_empty() {
            return Ok(vec![self.clone()]);
        }
        let sub = g.induced_subgraph(&common)?;
        let mut completions = Vec::new();
        visit_maximal_cliques(&sub, budget, |c| {
            let mut verts = own.clone();
            verts.extend(c.iter().map(|&i| common[i]));
            verts.sort_unstable();
            completions.push(verts);
        })?;
        completions.sort();
        completions
            .into_iter()
            .map(|verts| LoInequality::from_clique(&g, self.scenario, &verts))
            .collect()
    }

    /// Exact maximum of the left-hand side over the no-signaling polytope
    /// (normalization, nonnegativity and all no-signaling equations), by
    /// rational LP over the event probabilities.
    pub fn ns_max(&self) -> Result<Rational, InequalityError> {
        let s = &self.scenario;
        let vars = s.event_count();
        if vars > LP_VARIABLE_LIMIT {
            return Err(InequalityError::LpSizeLimit { variables: vars });
        }
        let n = s.parties();
        let (m, d) = (s.settings(), s.outcomes());
        let mut constraints = Vec::new();
        // normalization per context
        for ctx in 0..s.context_count() {
            let x = crate::boxes::decode_tuple(ctx, n, m);
            let mut coeffs = vec![Rational::zero(); vars];
            for out in 0..s.outcome_tuple_count() {
                let a = crate::boxes::decode_tuple(out, n, d);
                coeffs[s.index_of(&a, &x)?] = Rational::one();
            }
            constraints.push(Constraint { coeffs, relation: Relation::Eq, rhs: Rational::one() });
        }
        // no-signaling: party i's marginal equal for consecutive settings
        for i in 0..n {
            for xi in 0..m - 1 {
                for others_ctx in 0..m.pow((n - 1) as u32) {
                    let ox = crate::boxes::decode_tuple(others_ctx, n - 1, m);
                    for others_out in 0..d.pow((n - 1) as u32) {
                        let oa = crate::boxes::decode_tuple(others_out, n - 1, d);
                        let mut coeffs = vec![Rational::zero(); vars];
                        for ai in 0..d {
                            let mut a = oa.clone();
                            a.insert(i, ai as u8);
                            let mut x = ox.clone();
                            x.insert(i, xi as u8);
                            coeffs[s.index_of(&a, &x)?] = Rational::one();
                            x[i] = (xi + 1) as u8;
                            coeffs[s.index_of(&a, &x)?] = -Rational::one();
                        }
                        constraints.push(Constraint {
                            coeffs,
                            relation: Relation::Eq,
                            rhs: Rational::zero(),
                        });
                    }
                }
            }
        }
        let mut objective = vec![Rational::zero(); vars];
        for idx in self.event_indices() {
            objective[idx] = Rational::one();
        }
        match lp::maximize(&objective, &constraints) {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible | LpOutcome::Unbounded => {
                unreachable!("the no-signaling polytope is nonempty and bounded")
            }
        }
    }
}

/// Verdict of the level-`k` check: either every inequality holds on the
/// `k`-th tensor power, or a violating inequality is produced.
#[derive(Clone, PartialEq, Debug)]
pub enum LoVerdict {
    Satisfied,
    Violated { k: usize, inequality: LoInequality, value: Rational },
}

impl LoVerdict {
    pub fn satisfied(&self) -> bool {
        matches!(self, LoVerdict::Satisfied)
    }
}

/// Orthogonality graph induced on the support of `b`, with event labels.
/// Pairwise checks only; the full `(m d)^n` graph is never materialized.
pub fn support_graph(b: &NsBox) -> Result<(Graph, Vec<usize>), InequalityError> {
    let s = b.scenario();
    let support = b.support();
    let events: Vec<Event> = support.iter().map(|&i| s.event(i)).collect();
    let mut edges = Vec::new();
    for i in 0..events.len() {
        for j in i + 1..events.len() {
            if are_orthogonal(s, &events[i], &events[j])? {
                edges.push((i, j));
            }
        }
    }
    let g = Graph::from_edges(events.len(), &edges)?;
    let g = relabel(g, events);
    Ok((g, support))
}

fn relabel(g: Graph, events: Vec<Event>) -> Graph {
    // Graph has no public label setter; rebuild through induced_subgraph of
    // itself would lose labels too, so construct via a helper here.
    Graph::with_labels(g, events)
}

/// Does `b`'s `k`-th tensor power satisfy every orthogonality inequality?
/// Runs the threshold-weighted clique search on the support graph of
/// `b^(x k)` with the event probabilities as weights. On violation, the
/// first witness in deterministic search order is returned, restricted to
/// support events.
pub fn check_lo_k(
    b: &NsBox,
    k: usize,
    budget: &mut SearchBudget,
) -> Result<LoVerdict, InequalityError> {
    assert!(k >= 1);
    let power = b.tensor_power(k)?;
    let (graph, support) = support_graph(&power)?;
    let weights: Vec<Rational> = support.iter().map(|&i| power.prob_index(i)).collect();
    let scenario = *power.scenario();
    let wg = WeightedGraph::new(graph, weights);
    match max_weighted_clique(&wg, &Rational::one(), budget)? {
        None => Ok(LoVerdict::Satisfied),
        Some(witness) => {
            let inequality = LoInequality::from_clique(&wg.graph, scenario, &witness.clique)?;
            Ok(LoVerdict::Violated { k, inequality, value: witness.weight })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::LhvModel;
    use crate::ratio;

    pub(crate) fn gyni() -> LoInequality {
        let s = Scenario::new(3, 2, 2).unwrap();
        let terms = [
            ([0u8, 0, 0], [0u8, 0, 0]),
            ([1, 1, 0], [0, 1, 1]),
            ([0, 1, 1], [1, 0, 1]),
            ([1, 0, 1], [1, 1, 0]),
        ];
        LoInequality::from_events(
            s,
            terms
                .iter()
                .map(|(a, x)| Event::new(a.to_vec(), x.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn gyni_constructs_and_single_vertex_inequality() {
        let g = gyni();
        assert_eq!(g.terms(), 4);
        let s = Scenario::new(3, 2, 2).unwrap();
        let one = LoInequality::from_events(s, vec![Event::new(vec![0, 0, 0], vec![0, 0, 0])])
            .unwrap();
        assert_eq!(one.terms(), 1);
        // non-clique pair errors
        let bad = LoInequality::from_events(
            s,
            vec![
                Event::new(vec![0, 0, 0], vec![0, 0, 0]),
                Event::new(vec![1, 1, 1], vec![1, 1, 1]),
            ],
        );
        assert!(matches!(bad, Err(InequalityError::NotAClique { .. })));
    }

    #[test]
    fn gyni_at_deterministic_box_is_one() {
        let s = Scenario::new(3, 2, 2).unwrap();
        let det = NsBox::deterministic(s, &[0, 0, 0]).unwrap();
        assert_eq!(gyni().evaluate(&det).unwrap(), ratio(1, 1));
    }

    #[test]
    fn lhv_boxes_respect_gyni() {
        let s = Scenario::new(3, 2, 2).unwrap();
        let model = LhvModel {
            weights: vec![ratio(1, 3), ratio(2, 3)],
            strategies: vec![
                vec![vec![0, 1], vec![1, 0], vec![0, 0]],
                vec![vec![1, 1], vec![0, 1], vec![1, 0]],
            ],
        };
        let b = model.to_box(s).unwrap();
        assert!(gyni().evaluate(&b).unwrap() <= ratio(1, 1));
    }

    #[test]
    fn gyni_is_optimal_one_term_is_not() {
        assert!(gyni().is_optimal().unwrap());
        let s = Scenario::new(2, 2, 2).unwrap();
        let one =
            LoInequality::from_events(s, vec![Event::new(vec![0, 0], vec![0, 0])]).unwrap();
        assert!(!one.is_optimal().unwrap());
    }

    #[test]
    fn completing_a_maximal_clique_is_identity() {
        let g = gyni();
        let completions = g.complete_to_maximal(&mut SearchBudget::default()).unwrap();
        assert_eq!(completions, vec![g]);
    }

    #[test]
    fn completing_empty_gives_all_maximal_cliques() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let empty = LoInequality::from_events(s, vec![]).unwrap();
        let completions = empty.complete_to_maximal(&mut SearchBudget::default()).unwrap();
        // O_{2,2,2} has 12 maximal cliques
        assert_eq!(completions.len(), 12);
        assert!(completions.iter().all(|c| c.is_optimal().unwrap()));
    }

    #[test]
    fn ns_max_of_single_term_is_one() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let one =
            LoInequality::from_events(s, vec![Event::new(vec![0, 1], vec![1, 0])]).unwrap();
        assert_eq!(one.ns_max().unwrap(), ratio(1, 1));
    }

    #[test]
    fn ns_max_of_gyni_is_four_thirds() {
        assert_eq!(gyni().ns_max().unwrap(), ratio(4, 3));
    }

    #[test]
    fn ns_max_of_five_term_power_inequality_is_at_least_its_power_value() {
        // the 5-term inequality violated by two PR copies; the power box is
        // a feasible point of the LP, so the maximum is at least 5/4
        let s = Scenario::new(4, 2, 2).unwrap();
        let terms = [
            ([0u8, 0, 0, 0], [0u8, 0, 0, 0]),
            ([1, 1, 1, 0], [0, 0, 1, 1]),
            ([0, 0, 1, 1], [0, 1, 1, 0]),
            ([1, 1, 0, 1], [1, 0, 1, 1]),
            ([0, 1, 1, 1], [1, 1, 0, 1]),
        ];
        let ineq = LoInequality::from_events(
            s,
            terms
                .iter()
                .map(|(a, x)| Event::new(a.to_vec(), x.to_vec()))
                .collect(),
        )
        .unwrap();
        let pr2 = NsBox::pr().tensor_power(2).unwrap();
        assert_eq!(ineq.evaluate(&pr2).unwrap(), ratio(5, 4));
        assert!(ineq.ns_max().unwrap() >= ratio(5, 4));
    }

    #[test]
    fn pr_satisfies_lo1_violates_lo2() {
        let pr = NsBox::pr();
        let v1 = check_lo_k(&pr, 1, &mut SearchBudget::default()).unwrap();
        assert!(v1.satisfied());
        let v2 = check_lo_k(&pr, 2, &mut SearchBudget::default()).unwrap();
        match v2 {
            LoVerdict::Violated { k, inequality, value } => {
                assert_eq!(k, 2);
                assert_eq!(value, ratio(5, 4));
                assert_eq!(inequality.terms(), 5);
            }
            LoVerdict::Satisfied => panic!("two PR copies must violate level 2"),
        }
    }

    #[test]
    fn deterministic_boxes_satisfy_all_levels_tested() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let det = NsBox::deterministic(s, &[1, 0]).unwrap();
        for k in 1..=3 {
            assert!(check_lo_k(&det, k, &mut SearchBudget::default()).unwrap().satisfied());
        }
    }
}
