//! Coalition detection, shortest-path routing of trips and schedule checks.
//!
//! Networks are undirected. Routes are open: a trip leaves its depot, visits
//! its clients in delivery-window order and ends at the last client.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use num_traits::Zero;

use crate::assignment::TripPlan;
use crate::num::{dec, Rational};
use crate::scenario::{natural_cmp, ClientId, Network, Order, OrderId, Shipper, ShipperId, TimeWindow, TruckKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoutingError {
    #[error("node `{0}` is not in the network")]
    UnknownNode(String),
    #[error("no path from `{from}` to `{to}`")]
    Unreachable { from: String, to: String },
    #[error("trip references unknown order `{0}`")]
    UnknownOrder(OrderId),
}

/// Adjacency view of a [`Network`] with nodes indexed in natural order.
#[derive(Debug, Clone)]
pub struct Router {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
    adj: Vec<Vec<(usize, Rational)>>,
}

impl Router {
    pub fn new(network: &Network) -> Self {
        let mut names: Vec<String> = network.nodes.iter().cloned().collect();
        names.sort_by(|a, b| natural_cmp(a, b));
        let index: BTreeMap<String, usize> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let mut best: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for e in &network.edges {
            let (a, b) = (index[&e.from], index[&e.to]);
            for key in [(a, b), (b, a)] {
                let w = best.entry(key).or_insert(e.length);
                if e.length < *w {
                    *w = e.length;
                }
            }
        }
        let mut adj = vec![Vec::new(); names.len()];
        for ((a, b), w) in best {
            adj[a].push((b, w));
        }
        Self { names, index, adj }
    }

    fn node(&self, name: &str) -> Result<usize, RoutingError> {
        self.index.get(name).copied().ok_or_else(|| RoutingError::UnknownNode(name.to_string()))
    }

    /// Single-source distances; `None` for unreachable nodes.
    fn distances(&self, source: usize) -> Vec<Option<Rational>> {
        let mut dist: Vec<Option<Rational>> = vec![None; self.names.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = Some(Rational::zero());
        heap.push(Reverse((Rational::zero(), source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if dist[u].is_some_and(|best| d > best) {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                let nd = d + w;
                if dist[v].is_none_or(|cur| nd < cur) {
                    dist[v] = Some(nd);
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        dist
    }

    /// Minimum-length path. Among equally short paths the one whose node
    /// sequence is smallest in natural order wins. `from == to` yields an
    /// empty path of length zero.
    pub fn shortest_path(&self, from: &str, to: &str) -> Result<(Vec<String>, Rational), RoutingError> {
        let (s, t) = (self.node(from)?, self.node(to)?);
        if s == t {
            return Ok((Vec::new(), Rational::zero()));
        }
        let to_target = self.distances(t);
        let total = to_target[s].ok_or_else(|| RoutingError::Unreachable { from: from.into(), to: to.into() })?;
        let mut path = vec![s];
        let mut u = s;
        while u != t {
            let rest = to_target[u].expect("on a shortest path");
            // adjacency is sorted by node index, so the first match is the
            // smallest successor
            u = self.adj[u]
                .iter()
                .find(|&&(v, w)| to_target[v].is_some_and(|dv| dv + w == rest))
                .map(|&(v, _)| v)
                .expect("a successor on a shortest path exists");
            path.push(u);
        }
        Ok((path.into_iter().map(|i| self.names[i].clone()).collect(), total))
    }

    pub fn distance(&self, from: &str, to: &str) -> Result<Rational, RoutingError> {
        let (s, t) = (self.node(from)?, self.node(to)?);
        self.distances(s)[t].ok_or_else(|| RoutingError::Unreachable { from: from.into(), to: to.into() })
    }

    pub fn nodes(&self) -> &[String] {
        &self.names
    }
}

pub fn shortest_path(network: &Network, from: &str, to: &str) -> Result<(Vec<String>, Rational), RoutingError> {
    Router::new(network).shortest_path(from, to)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoalitionKind {
    FC,
    PC,
    NC,
}

impl fmt::Display for CoalitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoalitionKind::FC => "FC",
            CoalitionKind::PC => "PC",
            CoalitionKind::NC => "NC",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coalition {
    pub kind: CoalitionKind,
    pub members: BTreeSet<ShipperId>,
    pub served_clients: BTreeSet<ClientId>,
}

impl Coalition {
    pub fn single(shipper: &Shipper) -> Self {
        Self {
            kind: CoalitionKind::NC,
            members: BTreeSet::from([shipper.id.clone()]),
            served_clients: shipper.clients.clone(),
        }
    }

    /// Members joined by `-`, e.g. `S1-S6`.
    pub fn label(&self) -> String {
        self.members.iter().map(|m| m.as_str()).collect::<Vec<_>>().join("-")
    }

    /// Start node of every route: the shipper itself, a merged node named
    /// after the members when the network has one, else the smallest member.
    pub fn depot(&self, network: &Network) -> String {
        let label = self.label();
        if self.members.len() > 1 && network.contains(&label) {
            label
        } else {
            self.members.iter().next().map(|m| m.to_string()).unwrap_or_default()
        }
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind, self.label())
    }
}

/// All collaboration structures over the given shippers: full collaboration
/// for maximal groups with identical client sets, partial collaboration for
/// every other group of two or more sharing at least one client, and a
/// no-collaboration singleton per shipper.
pub fn detect_coalitions(shippers: &[Shipper]) -> Vec<Coalition> {
    let mut out = Vec::new();
    let mut by_clients: BTreeMap<&BTreeSet<ClientId>, BTreeSet<ShipperId>> = BTreeMap::new();
    for s in shippers {
        by_clients.entry(&s.clients).or_default().insert(s.id.clone());
    }
    for (clients, members) in &by_clients {
        if members.len() >= 2 {
            out.push(Coalition { kind: CoalitionKind::FC, members: members.clone(), served_clients: (*clients).clone() });
        }
    }

    let n = shippers.len();
    assert!(n < 24, "coalition detection enumerates subsets; {n} shippers is too many");
    for mask in 1u32..(1 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let group: Vec<&Shipper> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &shippers[i]).collect();
        if group.iter().all(|s| s.clients == group[0].clients) {
            continue;
        }
        let shared: BTreeSet<ClientId> = group[0]
            .clients
            .iter()
            .filter(|c| group.iter().all(|s| s.clients.contains(*c)))
            .cloned()
            .collect();
        if !shared.is_empty() {
            out.push(Coalition {
                kind: CoalitionKind::PC,
                members: group.iter().map(|s| s.id.clone()).collect(),
                served_clients: shared,
            });
        }
    }

    out.extend(shippers.iter().map(Coalition::single));
    out.sort_by(|a, b| {
        a.kind
            .cmp(&b.kind)
            .then_with(|| a.members.len().cmp(&b.members.len()))
            .then_with(|| a.members.iter().cmp(b.members.iter()))
    });
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub truck: TruckKey,
    pub orders: Vec<OrderId>,
    /// Depot followed by the visited clients.
    pub stops: Vec<String>,
    /// Length of each stop-to-stop leg.
    pub legs: Vec<Rational>,
    pub length: Rational,
}

impl Route {
    /// Stops joined by `-`, a merged depot in parentheses.
    pub fn describe(&self) -> String {
        self.stops
            .iter()
            .enumerate()
            .map(|(i, s)| if i == 0 && s.contains('-') { format!("({s})") } else { s.clone() })
            .collect::<Vec<_>>()
            .join("-")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteResult {
    pub coalition: Coalition,
    pub depot: String,
    pub routes: Vec<Route>,
    pub total: Rational,
}

impl RouteResult {
    pub fn trip_count(&self) -> usize {
        self.routes.len()
    }

    pub fn trucks_used(&self) -> BTreeSet<TruckKey> {
        self.routes.iter().map(|r| r.truck.clone()).collect()
    }
}

/// Routes every trip of `plan` from the coalition depot.
pub fn build_routes(coalition: &Coalition, plan: &TripPlan, orders: &[Order], network: &Network) -> Result<RouteResult, RoutingError> {
    let router = Router::new(network);
    build_routes_with(&router, coalition, plan, orders, network)
}

pub fn build_routes_with(
    router: &Router,
    coalition: &Coalition,
    plan: &TripPlan,
    orders: &[Order],
    network: &Network,
) -> Result<RouteResult, RoutingError> {
    let by_id: BTreeMap<&OrderId, &Order> = orders.iter().map(|o| (&o.id, o)).collect();
    let depot = coalition.depot(network);
    let mut routes = Vec::with_capacity(plan.trips.len());
    for trip in &plan.trips {
        let mut visits: Vec<&Order> = trip
            .orders
            .iter()
            .map(|id| by_id.get(id).copied().ok_or_else(|| RoutingError::UnknownOrder(id.clone())))
            .collect::<Result<_, _>>()?;
        visits.sort_by(|a, b| a.window.start.cmp(&b.window.start).then_with(|| a.client.cmp(&b.client)));
        let mut stops = vec![depot.clone()];
        for o in visits {
            if stops.last().map(String::as_str) != Some(o.client.as_str()) {
                stops.push(o.client.to_string());
            }
        }
        let legs = stops
            .windows(2)
            .map(|w| router.shortest_path(&w[0], &w[1]).map(|(_, d)| d))
            .collect::<Result<Vec<_>, _>>()?;
        let length = legs.iter().sum();
        routes.push(Route { truck: trip.truck.clone(), orders: trip.orders.clone(), stops, legs, length });
    }
    let total = routes.iter().map(|r| r.length).sum();
    Ok(RouteResult { coalition: coalition.clone(), depot, routes, total })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleViolation {
    Late { route: usize, order: OrderId, arrival: Rational, window_end: u32 },
    SpanExceeded { route: usize, span: Rational, bound: u32 },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::Late { route, order, arrival, window_end } => write!(
                f,
                "route {route}: order {order} reached at minute {} after window end {}",
                dec(arrival),
                crate::scenario::format_clock(*window_end)
            ),
            ScheduleViolation::SpanExceeded { route, span, bound } => {
                write!(f, "route {route}: travel time {} min exceeds bound of {bound} min", dec(span))
            }
        }
    }
}

/// Simulates each route from `departure` at `speed` distance units per
/// minute with zero service time. Departure defaults to the earliest window
/// start among the routed orders; `bound` limits the travel time per trip.
pub fn validate_schedule(
    result: &RouteResult,
    orders: &[Order],
    speed: Rational,
    departure: Option<u32>,
    bound: Option<&TimeWindow>,
) -> Vec<ScheduleViolation> {
    assert!(speed > Rational::zero(), "speed must be positive");
    let by_id: BTreeMap<&OrderId, &Order> = orders.iter().map(|o| (&o.id, o)).collect();
    let routed: Vec<&Order> =
        result.routes.iter().flat_map(|r| r.orders.iter()).filter_map(|id| by_id.get(id).copied()).collect();
    let Some(start) = departure.or_else(|| routed.iter().map(|o| o.window.start).min()) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (i, route) in result.routes.iter().enumerate() {
        let mut clock = Rational::from_integer(start.into());
        for (leg, stop) in route.legs.iter().zip(&route.stops[1..]) {
            clock += leg / speed;
            for id in &route.orders {
                if let Some(o) = by_id.get(id).filter(|o| o.client.as_str() == stop) {
                    if clock > Rational::from_integer(o.window.end.into()) {
                        out.push(ScheduleViolation::Late {
                            route: i,
                            order: o.id.clone(),
                            arrival: clock,
                            window_end: o.window.end,
                        });
                    }
                }
            }
        }
        if let Some(b) = bound {
            let span = route.length / speed;
            let allowed = b.end - b.start;
            if span > Rational::from_integer(allowed.into()) {
                out.push(ScheduleViolation::SpanExceeded { route: i, span, bound: allowed });
            }
        }
    }
    out
}

/// A full-collaboration group against the sum of its members' solo totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupComparison {
    pub coalition: String,
    pub collaborative: Rational,
    pub standalone: Rational,
}

impl GroupComparison {
    pub fn improves(&self) -> bool {
        self.collaborative < self.standalone
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioComparison {
    pub fc: Rational,
    pub pc: Rational,
    pub nc: Rational,
    /// `fc + pc < nc`; `None` when there is no FC or PC result.
    pub collaboration_shorter: Option<bool>,
    pub groups: Vec<GroupComparison>,
}

pub fn compare_scenarios(results: &[RouteResult]) -> ScenarioComparison {
    let total = |kind| -> Rational { results.iter().filter(|r| r.coalition.kind == kind).map(|r| r.total).sum() };
    let (fc, pc, nc) = (total(CoalitionKind::FC), total(CoalitionKind::PC), total(CoalitionKind::NC));
    let has_collab = results.iter().any(|r| r.coalition.kind != CoalitionKind::NC);
    let solo: BTreeMap<&ShipperId, Rational> = results
        .iter()
        .filter(|r| r.coalition.kind == CoalitionKind::NC)
        .filter_map(|r| r.coalition.members.iter().next().map(|m| (m, r.total)))
        .collect();
    let groups = results
        .iter()
        .filter(|r| r.coalition.kind == CoalitionKind::FC)
        .filter(|r| r.coalition.members.iter().all(|m| solo.contains_key(m)))
        .map(|r| GroupComparison {
            coalition: r.coalition.label(),
            collaborative: r.total,
            standalone: r.coalition.members.iter().map(|m| solo[m]).sum(),
        })
        .collect();
    ScenarioComparison { fc, pc, nc, collaboration_shorter: has_collab.then(|| fc + pc < nc), groups }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::assignment::Trip;
    use crate::num::int;
    use crate::scenario::Edge;
    use proptest::prelude::*;

    pub fn net(edges: &[(&str, &str, i128)]) -> Network {
        Network::new(
            Vec::<String>::new(),
            edges.iter().map(|&(a, b, l)| Edge { from: a.into(), to: b.into(), length: int(l) }).collect(),
        )
        .unwrap()
    }

    /// Independent oracle: minimum over every simple path.
    pub fn brute_force(n: usize, edges: &[(usize, usize, i128)], s: usize, t: usize) -> Option<i128> {
        fn dfs(u: usize, t: usize, adj: &[Vec<(usize, i128)>], seen: &mut Vec<bool>, acc: i128, best: &mut Option<i128>) {
            if u == t {
                *best = Some(best.map_or(acc, |b| b.min(acc)));
                return;
            }
            for &(v, w) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    dfs(v, t, adj, seen, acc + w, best);
                    seen[v] = false;
                }
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut best = None;
        dfs(s, t, &adj, &mut seen, 0, &mut best);
        best
    }

    fn shipper(id: &str, clients: &[&str]) -> Shipper {
        Shipper { id: ShipperId::new(id), clients: clients.iter().map(|c| ClientId::new(*c)).collect() }
    }

    #[test]
    fn identity_and_unknown_nodes() {
        let n = net(&[("A", "B", 3)]);
        assert_eq!(shortest_path(&n, "A", "A").unwrap(), (vec![], int(0)));
        assert_eq!(shortest_path(&n, "A", "Z"), Err(RoutingError::UnknownNode("Z".into())));
        let split = Network::new(vec!["C".to_string()], n.edges.clone()).unwrap();
        assert!(matches!(shortest_path(&split, "A", "C"), Err(RoutingError::Unreachable { .. })));
    }

    #[test]
    fn ties_resolve_to_smallest_nodes() {
        let n = net(&[("A", "C", 1), ("C", "D", 1), ("A", "B", 1), ("B", "D", 1)]);
        let (path, d) = shortest_path(&n, "A", "D").unwrap();
        assert_eq!(path, vec!["A", "B", "D"]);
        assert_eq!(d, int(2));
    }

    #[test]
    fn coalitions_on_overlapping_clients() {
        let shippers = vec![
            shipper("S1", &["C1", "C2"]),
            shipper("S2", &["C2", "C3"]),
            shipper("S3", &["C4"]),
            shipper("S4", &["C1", "C2"]),
        ];
        let cs = detect_coalitions(&shippers);
        let fc: Vec<_> = cs.iter().filter(|c| c.kind == CoalitionKind::FC).collect();
        assert_eq!(fc.len(), 1);
        assert_eq!(fc[0].label(), "S1-S4");
        let pc: Vec<String> = cs.iter().filter(|c| c.kind == CoalitionKind::PC).map(|c| c.label()).collect();
        assert_eq!(pc, vec!["S1-S2", "S2-S4", "S1-S2-S4"]);
        assert_eq!(cs.iter().filter(|c| c.kind == CoalitionKind::NC).count(), 4);
        for c in &cs {
            for m in &c.members {
                let s = shippers.iter().find(|s| &s.id == m).unwrap();
                assert!(c.served_clients.is_subset(&s.clients));
            }
        }
    }

    #[test]
    fn disjoint_shippers_stay_solo() {
        let cs = detect_coalitions(&[shipper("S1", &["C1"]), shipper("S2", &["C2"])]);
        assert!(cs.iter().all(|c| c.kind == CoalitionKind::NC));
    }

    fn order(shipper: &str, client: &str, start: u32, end: u32) -> Order {
        Order {
            id: OrderId(format!("{shipper}:{client}")),
            shipper: ShipperId::new(shipper),
            client: ClientId::new(client),
            packets: 1,
            packet_size: int(10),
            window: TimeWindow::new(start, end).unwrap(),
        }
    }

    fn trip(owner: &str, orders: &[&Order]) -> Trip {
        Trip {
            truck: TruckKey::new(owner, "T1"),
            orders: orders.iter().map(|o| o.id.clone()).collect(),
            load: orders.iter().map(|o| o.quantity()).sum(),
        }
    }

    #[test]
    fn routes_follow_window_order_and_merged_depot() {
        let n = net(&[("S1-S2", "C1", 5), ("C1", "C2", 5), ("S1", "C1", 7), ("C2", "C3", 4)]);
        let a = order("S1", "C2", 540, 600);
        let b = order("S1", "C1", 480, 600);
        let c = order("S2", "C3", 600, 660);
        let coalition = Coalition {
            kind: CoalitionKind::FC,
            members: ["S1", "S2"].into_iter().map(ShipperId::new).collect(),
            served_clients: BTreeSet::new(),
        };
        let plan = TripPlan { trips: vec![trip("S1", &[&a, &b, &c])] };
        let orders = [a, b, c];
        let r = build_routes(&coalition, &plan, &orders, &n).unwrap();
        assert_eq!(r.depot, "S1-S2");
        assert_eq!(r.routes[0].stops, vec!["S1-S2", "C1", "C2", "C3"]);
        assert_eq!(r.routes[0].describe(), "(S1-S2)-C1-C2-C3");
        assert_eq!(r.total, int(14));
        assert!(validate_schedule(&r, &orders, int(1), None, None).is_empty());
        let late = validate_schedule(&r, &orders, int(1), Some(700), None);
        assert_eq!(late.len(), 3);
        let tight = TimeWindow::new(480, 490).unwrap();
        assert_eq!(validate_schedule(&r, &orders, int(1), None, Some(&tight)).len(), 1);
    }

    #[test]
    fn empty_plan_has_no_routes() {
        let n = net(&[("S1", "C1", 1)]);
        let c = Coalition::single(&shipper("S1", &["C1"]));
        let r = build_routes(&c, &TripPlan::default(), &[], &n).unwrap();
        assert_eq!((r.trip_count(), r.total), (0, int(0)));
        assert!(validate_schedule(&r, &[], int(1), None, None).is_empty());
    }

    #[test]
    fn comparison_without_collaboration_is_not_applicable() {
        let n = net(&[("S1", "C1", 1)]);
        let c = Coalition::single(&shipper("S1", &["C1"]));
        let r = build_routes(&c, &TripPlan::default(), &[], &n).unwrap();
        let cmp = compare_scenarios(&[r]);
        assert_eq!(cmp.collaboration_shorter, None);
        assert!(cmp.groups.is_empty());
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, i128)>)> {
        (2usize..=8).prop_flat_map(|n| {
            let tree = prop::collection::vec((any::<prop::sample::Index>(), 1i128..20), n - 1);
            let extra = prop::collection::vec((0..n, 0..n, 1i128..20), 0..12);
            (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
                let mut edges: Vec<(usize, usize, i128)> =
                    tree.into_iter().enumerate().map(|(i, (p, w))| (i + 1, p.index(i + 1), w)).collect();
                edges.extend(extra.into_iter().filter(|(a, b, _)| a != b));
                (n, edges)
            })
        })
    }

    fn to_network(edges: &[(usize, usize, i128)]) -> Network {
        Network::new(
            Vec::<String>::new(),
            edges.iter().map(|&(a, b, w)| Edge { from: format!("N{a}"), to: format!("N{b}"), length: int(w) }).collect(),
        )
        .unwrap()
    }

    proptest! {
        #[test]
        fn dijkstra_matches_path_enumeration((n, edges) in arb_graph()) {
            let router = Router::new(&to_network(&edges));
            for s in 0..n {
                for t in 0..n {
                    let (path, d) = router.shortest_path(&format!("N{s}"), &format!("N{t}")).unwrap();
                    prop_assert_eq!(d, int(brute_force(n, &edges, s, t).unwrap()));
                    if s != t {
                        prop_assert_eq!(path.first().unwrap(), &format!("N{s}"));
                        prop_assert_eq!(path.last().unwrap(), &format!("N{t}"));
                    }
                }
            }
        }

        #[test]
        fn triangle_inequality((n, edges) in arb_graph()) {
            let router = Router::new(&to_network(&edges));
            let d = |a: usize, b: usize| router.distance(&format!("N{a}"), &format!("N{b}")).unwrap();
            for a in 0..n { for b in 0..n { for c in 0..n {
                prop_assert!(d(a, c) <= d(a, b) + d(b, c));
            }}}
        }

        #[test]
        fn adding_an_edge_never_lengthens((n, edges) in arb_graph(), a in 0usize..8, b in 0usize..8, w in 1i128..20) {
            let (a, b) = (a % n, b % n);
            prop_assume!(a != b);
            let before = Router::new(&to_network(&edges));
            let mut more = edges.clone();
            more.push((a, b, w));
            let after = Router::new(&to_network(&more));
            for s in 0..n { for t in 0..n {
                let (x, y) = (format!("N{s}"), format!("N{t}"));
                prop_assert!(after.distance(&x, &y).unwrap() <= before.distance(&x, &y).unwrap());
            }}
        }

        #[test]
        fn total_is_order_invariant(lens in prop::collection::vec(1i128..30, 0..6)) {
            let edges: Vec<(String, String, i128)> = lens.iter().enumerate().map(|(i, &l)| ("S1".to_string(), format!("C{i}"), l)).collect();
            let n = Network::new(Vec::<String>::new(), edges.iter().map(|(a, b, l)| Edge { from: a.clone(), to: b.clone(), length: int(*l) }).collect()).unwrap();
            let orders: Vec<Order> = (0..lens.len()).map(|i| order("S1", &format!("C{i}"), 540, 600)).collect();
            let trips: Vec<Trip> = orders.iter().map(|o| trip("S1", &[o])).collect();
            let c = Coalition::single(&shipper("S1", &[]));
            let fwd = build_routes(&c, &TripPlan { trips: trips.clone() }, &orders, &n).unwrap();
            let mut rev = trips;
            rev.reverse();
            let back = build_routes(&c, &TripPlan { trips: rev }, &orders, &n).unwrap();
            prop_assert_eq!(fwd.total, back.total);
            prop_assert_eq!(fwd.total, int(lens.iter().sum::<i128>()));
        }
    }
}
