//! Goods-to-vehicle assignment: packs atomic client orders into truck trips
//! with the fewest trips the accepted fleet allows.
//!
//! Trucks can be reused for any number of trips, so the trip count is a
//! one-dimensional bin-packing problem with the largest accepted capacity as
//! bin size. The exact minimum is found by branch and bound seeded with
//! first-fit decreasing; among all minimum plans the lexicographically
//! smallest sequence of `(truck, order ids)` trips is returned.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::num::{dec, Rational};
use crate::scenario::{Order, OrderId, Truck, TruckKey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssignmentError {
    #[error("order `{order}` ({quantity} kg) exceeds every truck capacity (max {max_capacity} kg)")]
    Infeasible { order: OrderId, quantity: String, max_capacity: String },
    #[error("no accepted trucks")]
    NoTrucks,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Trip {
    pub truck: TruckKey,
    /// Sorted order ids.
    pub orders: Vec<OrderId>,
    pub load: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripPlan {
    pub trips: Vec<Trip>,
}

impl TripPlan {
    pub fn trip_count(&self) -> usize {
        self.trips.len()
    }

    pub fn total_load(&self) -> Rational {
        self.trips.iter().map(|t| t.load).sum()
    }

    /// Checks the plan invariants against the orders it should cover and the
    /// trucks it may use. Returns a description of the first violation.
    pub fn validate(&self, orders: &[Order], trucks: &[Truck]) -> Result<(), String> {
        let by_id: BTreeMap<&OrderId, &Order> = orders.iter().map(|o| (&o.id, o)).collect();
        let mut seen = BTreeSet::new();
        for (i, trip) in self.trips.iter().enumerate() {
            let truck = trucks
                .iter()
                .find(|t| t.key == trip.truck)
                .ok_or_else(|| format!("trip {i} uses truck {} outside the allowed fleet", trip.truck))?;
            let mut load = Rational::zero();
            for id in &trip.orders {
                let o = by_id.get(id).ok_or_else(|| format!("trip {i} carries unknown order {id}"))?;
                if !seen.insert(id.clone()) {
                    return Err(format!("order {id} appears in more than one trip"));
                }
                load += o.quantity();
            }
            if load != trip.load {
                return Err(format!("trip {i} load {} differs from its orders' sum {}", dec(&trip.load), dec(&load)));
            }
            if load > truck.capacity {
                return Err(format!("trip {i} load {} exceeds {} capacity {}", dec(&load), truck.key, dec(&truck.capacity)));
            }
        }
        if seen.len() != orders.len() {
            return Err(format!("plan covers {} of {} orders", seen.len(), orders.len()));
        }
        Ok(())
    }
}

/// Trips whose orders' delivery windows do not overlap pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowConflict {
    pub trip: usize,
    pub first: OrderId,
    pub second: OrderId,
}

/// Post-hoc check: windows are not enforced while packing.
pub fn window_conflicts(plan: &TripPlan, orders: &[Order]) -> Vec<WindowConflict> {
    let by_id: BTreeMap<&OrderId, &Order> = orders.iter().map(|o| (&o.id, o)).collect();
    let mut out = Vec::new();
    for (t, trip) in plan.trips.iter().enumerate() {
        let members: Vec<&Order> = trip.orders.iter().filter_map(|id| by_id.get(id).copied()).collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if !a.window.overlaps(&b.window) {
                    out.push(WindowConflict { trip: t, first: a.id.clone(), second: b.id.clone() });
                }
            }
        }
    }
    out
}

struct Item {
    id: OrderId,
    size: Rational,
}

fn prepare(orders: &[Order], trucks: &[Truck]) -> Result<(Vec<Item>, Rational), AssignmentError> {
    let cap = trucks.iter().map(|t| t.capacity).max().ok_or(AssignmentError::NoTrucks)?;
    let mut items: Vec<Item> = orders.iter().map(|o| Item { id: o.id.clone(), size: o.quantity() }).collect();
    if let Some(big) = items.iter().find(|i| i.size > cap) {
        return Err(AssignmentError::Infeasible {
            order: big.id.clone(),
            quantity: dec(&big.size),
            max_capacity: dec(&cap),
        });
    }
    items.sort_by(|a, b| b.size.cmp(&a.size).then_with(|| a.id.cmp(&b.id)));
    Ok((items, cap))
}

fn first_fit_decreasing(items: &[Item], cap: Rational) -> usize {
    let mut bins: Vec<Rational> = Vec::new();
    for item in items {
        match bins.iter_mut().find(|b| **b + item.size <= cap) {
            Some(b) => *b += item.size,
            None => bins.push(item.size),
        }
    }
    bins.len()
}

fn ceil_div(total: Rational, cap: Rational) -> usize {
    (total / cap).ceil().to_integer() as usize
}

/// Smallest number of bins of size `cap` holding every item.
fn min_bins(items: &[Item], cap: Rational) -> usize {
    if items.is_empty() {
        return 0;
    }
    let total: Rational = items.iter().map(|i| i.size).sum();
    let lower = ceil_div(total, cap);
    let mut best = first_fit_decreasing(items, cap);
    if best == lower {
        return best;
    }
    let mut bins = Vec::new();
    branch(items, 0, cap, &mut bins, &mut best, lower);
    best
}

fn branch(items: &[Item], next: usize, cap: Rational, bins: &mut Vec<Rational>, best: &mut usize, lower: usize) {
    if *best == lower {
        return;
    }
    if next == items.len() {
        *best = (*best).min(bins.len());
        return;
    }
    let remaining: Rational = items[next..].iter().map(|i| i.size).sum();
    let slack: Rational = bins.iter().map(|b| cap - *b).sum();
    let extra = if remaining > slack { ceil_div(remaining - slack, cap) } else { 0 };
    if bins.len() + extra >= *best {
        return;
    }
    let size = items[next].size;
    let mut tried: Vec<Rational> = Vec::new();
    for i in 0..bins.len() {
        if bins[i] + size <= cap && !tried.contains(&bins[i]) {
            tried.push(bins[i]);
            bins[i] += size;
            branch(items, next + 1, cap, bins, best, lower);
            bins[i] -= size;
        }
    }
    if bins.len() + 1 < *best {
        bins.push(size);
        branch(items, next + 1, cap, bins, best, lower);
        bins.pop();
    }
}

/// Smallest truck (by key) able to carry `load`.
fn cheapest_truck(trucks: &[Truck], load: Rational) -> Option<&Truck> {
    trucks.iter().filter(|t| t.capacity >= load).min_by(|a, b| a.key.cmp(&b.key))
}

fn plan_from_groups(groups: &[Vec<usize>], items: &[Item], pick: impl Fn(Rational) -> TruckKey) -> TripPlan {
    let mut trips: Vec<Trip> = groups
        .iter()
        .map(|g| {
            let load: Rational = g.iter().map(|&i| items[i].size).sum();
            let mut orders: Vec<OrderId> = g.iter().map(|&i| items[i].id.clone()).collect();
            orders.sort();
            Trip { truck: pick(load), orders, load }
        })
        .collect();
    trips.sort();
    TripPlan { trips }
}

/// Visits every partition of `items` into at most `max_groups` groups whose
/// sums stay within `cap`.
fn for_each_partition(
    items: &[Item],
    cap: Rational,
    max_groups: usize,
    groups: &mut Vec<Vec<usize>>,
    loads: &mut Vec<Rational>,
    next: usize,
    visit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if next == items.len() {
        visit(groups);
        return;
    }
    let size = items[next].size;
    for g in 0..groups.len() {
        if loads[g] + size <= cap {
            groups[g].push(next);
            loads[g] += size;
            for_each_partition(items, cap, max_groups, groups, loads, next + 1, visit);
            loads[g] -= size;
            groups[g].pop();
        }
    }
    if groups.len() < max_groups {
        groups.push(vec![next]);
        loads.push(size);
        for_each_partition(items, cap, max_groups, groups, loads, next + 1, visit);
        loads.pop();
        groups.pop();
    }
}

/// Capacity-feasible plan with the minimum number of trips.
pub fn min_trips(orders: &[Order], trucks: &[Truck]) -> Result<TripPlan, AssignmentError> {
    if orders.is_empty() {
        return Ok(TripPlan::default());
    }
    let (items, cap) = prepare(orders, trucks)?;
    let k = min_bins(&items, cap);

    // Tie-break over all k-trip partitions, items in id order so each
    // partition is produced once.
    let mut by_id: Vec<Item> = items;
    by_id.sort_by(|a, b| a.id.cmp(&b.id));
    let pick = |load: Rational| cheapest_truck(trucks, load).expect("load fits the largest truck").key.clone();
    let mut best: Option<TripPlan> = None;
    let mut visit = |groups: &[Vec<usize>]| {
        if groups.len() != k {
            return;
        }
        let plan = plan_from_groups(groups, &by_id, pick);
        if best.as_ref().is_none_or(|b| plan.trips < b.trips) {
            best = Some(plan);
        }
    };
    for_each_partition(&by_id, cap, k, &mut Vec::new(), &mut Vec::new(), 0, &mut visit);
    Ok(best.expect("a partition with the minimum trip count exists"))
}

/// Every capacity-feasible plan (partition plus a fitting truck per trip),
/// sorted by trip count and then by trip sequence, truncated to `max_plans`.
/// Exhaustive; intended for a handful of orders.
pub fn enumerate_allocations(orders: &[Order], trucks: &[Truck], max_plans: usize) -> Result<Vec<TripPlan>, AssignmentError> {
    if orders.is_empty() {
        return Ok(vec![TripPlan::default()]);
    }
    let (mut items, cap) = prepare(orders, trucks)?;
    items.sort_by(|a, b| a.id.cmp(&b.id));
    let mut plans: Vec<TripPlan> = Vec::new();
    let mut visit = |groups: &[Vec<usize>]| {
        let loads: Vec<Rational> = groups.iter().map(|g| g.iter().map(|&i| items[i].size).sum()).collect();
        let options: Vec<Vec<&Truck>> =
            loads.iter().map(|l| trucks.iter().filter(|t| t.capacity >= *l).collect()).collect();
        let mut choice = vec![0usize; groups.len()];
        loop {
            let mut trips: Vec<Trip> = groups
                .iter()
                .enumerate()
                .map(|(g, members)| {
                    let mut ids: Vec<OrderId> = members.iter().map(|&i| items[i].id.clone()).collect();
                    ids.sort();
                    Trip { truck: options[g][choice[g]].key.clone(), orders: ids, load: loads[g] }
                })
                .collect();
            trips.sort();
            plans.push(TripPlan { trips });
            // odometer over truck options
            let mut pos = 0;
            while pos < choice.len() {
                choice[pos] += 1;
                if choice[pos] < options[pos].len() {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
        }
    };
    for_each_partition(&items, cap, items.len(), &mut Vec::new(), &mut Vec::new(), 0, &mut visit);
    plans.sort_by(|a, b| a.trip_count().cmp(&b.trip_count()).then_with(|| a.trips.cmp(&b.trips)));
    plans.dedup();
    plans.truncate(max_plans);
    Ok(plans)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::num::int;
    use crate::scenario::{ClientId, EmissionFactor, ShipperId, TimeWindow};
    use proptest::prelude::*;

    pub fn order(shipper: &str, client: &str, qty: i128) -> Order {
        Order {
            id: OrderId(format!("{shipper}:{client}")),
            shipper: ShipperId::new(shipper),
            client: ClientId::new(client),
            packets: 1,
            packet_size: int(qty),
            window: TimeWindow::new(540, 600).unwrap(),
        }
    }

    pub fn truck(owner: &str, id: &str, cap: i128) -> Truck {
        Truck {
            key: TruckKey::new(owner, id),
            gains: int(0),
            capacity: int(cap),
            size: int(100),
            emission: EmissionFactor { base: "E1".into(), multiplier: int(1) },
        }
    }

    fn orders(shipper: &str, qty: &[i128]) -> Vec<Order> {
        qty.iter().enumerate().map(|(i, &q)| order(shipper, &format!("C{}", i + 1), q)).collect()
    }

    /// Independent oracle: every set partition, no pruning beyond capacity.
    pub fn oracle_min_trips(sizes: &[i128], cap: i128) -> usize {
        fn rec(sizes: &[i128], cap: i128, i: usize, bins: &mut Vec<i128>, best: &mut usize) {
            if i == sizes.len() {
                *best = (*best).min(bins.len());
                return;
            }
            for b in 0..bins.len() {
                bins[b] += sizes[i];
                if bins[b] <= cap {
                    rec(sizes, cap, i + 1, bins, best);
                }
                bins[b] -= sizes[i];
            }
            bins.push(sizes[i]);
            rec(sizes, cap, i + 1, bins, best);
            bins.pop();
        }
        let mut best = usize::MAX;
        rec(sizes, cap, 0, &mut Vec::new(), &mut best);
        if sizes.is_empty() { 0 } else { best }
    }

    #[test]
    fn single_truck_reused() {
        let os = orders("S2", &[200, 100, 50, 50]);
        let plan = min_trips(&os, &[truck("S2", "T4", 200)]).unwrap();
        assert_eq!(plan.trip_count(), 2);
        plan.validate(&os, &[truck("S2", "T4", 200)]).unwrap();
        let loads: Vec<Rational> = plan.trips.iter().map(|t| t.load).collect();
        assert!(loads.contains(&int(200)));
    }

    #[test]
    fn three_trips_on_small_truck() {
        let os = orders("S3", &[100, 50, 50, 100]);
        assert_eq!(min_trips(&os, &[truck("S3", "T5", 100)]).unwrap().trip_count(), 3);
    }

    #[test]
    fn capacity_is_never_exceeded() {
        let os = orders("S4", &[50, 100, 30, 30]);
        let fleet = [truck("S4", "T7", 50), truck("S4", "T8", 100)];
        let plan = min_trips(&os, &fleet).unwrap();
        assert_eq!(plan.trip_count(), 3);
        assert_eq!(oracle_min_trips(&[50, 100, 30, 30], 100), 3);
        plan.validate(&os, &fleet).unwrap();
    }

    #[test]
    fn empty_and_error_cases() {
        assert_eq!(min_trips(&[], &[]).unwrap().trip_count(), 0);
        let os = orders("S1", &[10]);
        assert_eq!(min_trips(&os, &[]), Err(AssignmentError::NoTrucks));
        let big = orders("S1", &[300]);
        assert!(matches!(min_trips(&big, &[truck("S1", "T1", 200)]), Err(AssignmentError::Infeasible { .. })));
    }

    #[test]
    fn tie_break_prefers_smallest_truck_that_fits() {
        let os = orders("S1", &[200, 20, 100, 60]);
        let fleet = [truck("S1", "T1", 100), truck("S1", "T2", 200)];
        let plan = min_trips(&os, &fleet).unwrap();
        assert_eq!(plan.trip_count(), 2);
        assert!(plan.trips.iter().all(|t| t.truck.id == "T2"));

        let os = orders("S6", &[100, 20, 100, 60]);
        let fleet = [truck("S6", "T1", 200), truck("S6", "T2", 50)];
        let plan = min_trips(&os, &fleet).unwrap();
        assert_eq!(plan.trip_count(), 2);
        plan.validate(&os, &fleet).unwrap();
    }

    #[test]
    fn enumeration_head_matches_min_trips() {
        let os = orders("S1", &[200, 20, 100, 60]);
        let fleet = [truck("S1", "T1", 100), truck("S1", "T2", 200)];
        let plans = enumerate_allocations(&os, &fleet, 100).unwrap();
        assert_eq!(plans[0], min_trips(&os, &fleet).unwrap());
        assert!(plans.windows(2).all(|w| w[0].trip_count() <= w[1].trip_count()));
        for p in &plans {
            p.validate(&os, &fleet).unwrap();
        }
        assert_eq!(enumerate_allocations(&os, &fleet, 3).unwrap().len(), 3);
    }

    #[test]
    fn verification_minima() {
        let s1 = orders("S1", &[200, 100, 100, 60]);
        assert_eq!(enumerate_allocations(&s1, &[truck("S1", "T1", 200)], 10).unwrap()[0].trip_count(), 3);
        let s6 = orders("S6", &[100, 20, 100, 60]);
        let fleet = [truck("S6", "T1", 200), truck("S6", "T2", 50)];
        assert_eq!(enumerate_allocations(&s6, &fleet, 10).unwrap()[0].trip_count(), 2);
    }

    #[test]
    fn window_conflicts_are_flagged() {
        let mut a = order("S1", "C1", 10);
        let mut b = order("S1", "C2", 10);
        a.window = TimeWindow::new(540, 600).unwrap();
        b.window = TimeWindow::new(600, 660).unwrap();
        let plan = min_trips(&[a.clone(), b.clone()], &[truck("S1", "T1", 100)]).unwrap();
        assert_eq!(plan.trip_count(), 1);
        assert_eq!(window_conflicts(&plan, &[a, b]).len(), 1);
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<i128>, Vec<i128>)> {
        (prop::collection::vec(1i128..=100, 1..=3), prop::collection::vec(1i128..=100, 0..=8)).prop_map(|(caps, sizes)| {
            let cap = *caps.iter().max().unwrap();
            (caps, sizes.into_iter().map(|s| s.min(cap)).collect())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn matches_partition_oracle((caps, sizes) in arb_instance()) {
            let os = orders("S", &sizes);
            let fleet: Vec<Truck> = caps.iter().enumerate().map(|(i, &c)| truck("S", &format!("T{i}"), c)).collect();
            let plan = min_trips(&os, &fleet).unwrap();
            let cap = *caps.iter().max().unwrap();
            prop_assert_eq!(plan.trip_count(), oracle_min_trips(&sizes, cap));
            plan.validate(&os, &fleet).unwrap();
            let total: i128 = sizes.iter().sum();
            prop_assert!(plan.trip_count() >= ((total + cap - 1) / cap) as usize);
        }

        #[test]
        fn permutation_does_not_change_trip_count((caps, sizes) in arb_instance()) {
            let os = orders("S", &sizes);
            let fleet: Vec<Truck> = caps.iter().enumerate().map(|(i, &c)| truck("S", &format!("T{i}"), c)).collect();
            let mut rev = os.clone();
            rev.reverse();
            prop_assert_eq!(min_trips(&os, &fleet).unwrap().trip_count(), min_trips(&rev, &fleet).unwrap().trip_count());
        }

        #[test]
        fn enumerated_plans_are_valid((caps, sizes) in arb_instance().prop_filter("small", |(_, s)| s.len() <= 5)) {
            let os = orders("S", &sizes);
            let fleet: Vec<Truck> = caps.iter().enumerate().map(|(i, &c)| truck("S", &format!("T{i}"), c)).collect();
            let plans = enumerate_allocations(&os, &fleet, 50).unwrap();
            prop_assert_eq!(&plans[0], &min_trips(&os, &fleet).unwrap());
            for p in &plans {
                prop_assert!(p.validate(&os, &fleet).is_ok());
            }
        }
    }
}
