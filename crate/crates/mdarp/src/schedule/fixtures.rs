//! A hand-checked scenario shared by the schedule tests: two vehicles,
//! three requests, and a corridor where platooning pays off. Every
//! expected number quoted in the tests was derived by hand from the arc
//! lengths below, so the tests are anchored outside the code under test.
//!
//! Arc lengths (miles, travel time equal in minutes):
//!
//! ```text
//! 1-8: 1    8-9: 1.2   8-20: 14   5-6: 1    4-5: 1
//! 4-9: 1    4-24: 14   19-24: 5   9-15: 6   15-21: 6
//! 20-21: 1  19-20: 1   21-24: 3
//! ```
//!
//! Vehicle 0 starts at node 1, vehicle 1 at node 6, both capacity 4 and
//! ready at 0. Requests (party 2, ready 0): r0 from 8 to 20, r1 from 4
//! to 19, r2 from 5 to 24. Single-rate saving 10%, alpha = beta = 1.
//!
//! Independent tours: v0 drives 1-8-20 (distance 15), v1 drives
//! 6-5-4-24-19 (21); dropoffs at 15, 16 and 21 give passenger time
//! 2*(15+16+21) = 104 and total 140.
//!
//! Corridor solution: both vehicles run the leg 9-15-21 docked, r1
//! hands over from v1 to v0 on arc (9, 15), and v0 finishes r1 at node
//! 19. v0 reaches node 9 at 2.2 and waits 0.8 for v1 (arrives 3.0).
//! Savings price the two corridor arcs at 0.9 each: vehicle cost
//! 15.0 + 16.8 = 31.8, dropoffs at 16, 17 and 18 give passenger time
//! 102, total 133.8.

use crate::instance::{Instance, Meta, Parameters, Request, Saving, Vehicle};
use crate::network::{Arc, Network, Node};
use crate::schedule::{Action, Plan, PlatoonSegment, Route, Stop, TransferRecord};

pub(crate) fn network() -> Network {
    let nodes = [1, 4, 5, 6, 8, 9, 15, 19, 20, 21, 24]
        .iter()
        .map(|&id| Node {
            id,
            x: 0.0,
            y: 0.0,
        })
        .collect();
    let arcs = [
        (1, 8, 1.0),
        (8, 9, 1.2),
        (8, 20, 14.0),
        (5, 6, 1.0),
        (4, 5, 1.0),
        (4, 9, 1.0),
        (4, 24, 14.0),
        (19, 24, 5.0),
        (9, 15, 6.0),
        (15, 21, 6.0),
        (20, 21, 1.0),
        (19, 20, 1.0),
        (21, 24, 3.0),
    ]
    .iter()
    .map(|&(a, b, w)| Arc {
        a,
        b,
        distance: w,
        time: w,
    })
    .collect();
    Network::new(nodes, arcs).unwrap()
}

pub(crate) fn instance() -> Instance {
    let inst = Instance {
        network: network(),
        vehicles: vec![
            Vehicle {
                id: 0,
                start: 1,
                end: None,
                capacity: 4,
                ready: 0.0,
            },
            Vehicle {
                id: 1,
                start: 6,
                end: None,
                capacity: 4,
                ready: 0.0,
            },
        ],
        requests: vec![
            Request {
                id: 0,
                pickup: 8,
                dropoff: 20,
                party: 2,
                ready: 0.0,
                pickup_window: None,
                dropoff_window: None,
            },
            Request {
                id: 1,
                pickup: 4,
                dropoff: 19,
                party: 2,
                ready: 0.0,
                pickup_window: None,
                dropoff_window: None,
            },
            Request {
                id: 2,
                pickup: 5,
                dropoff: 24,
                party: 2,
                ready: 0.0,
                pickup_window: None,
                dropoff_window: None,
            },
        ],
        params: Parameters {
            alpha: 1.0,
            beta: 1.0,
            saving: Saving::Single { eta: 0.1 },
            max_platoon: 4,
        },
        meta: Meta::default(),
    };
    inst.validate().unwrap();
    inst
}

pub(crate) fn solo_plan() -> Plan {
    Plan {
        routes: vec![
            Route {
                vehicle: 0,
                stops: vec![
                    Stop::pass(1),
                    Stop::new(8, vec![Action::Pickup(0)]),
                    Stop::new(20, vec![Action::Dropoff(0)]),
                ],
            },
            Route {
                vehicle: 1,
                stops: vec![
                    Stop::pass(6),
                    Stop::new(5, vec![Action::Pickup(2)]),
                    Stop::new(4, vec![Action::Pickup(1)]),
                    Stop::new(24, vec![Action::Dropoff(2)]),
                    Stop::new(19, vec![Action::Dropoff(1)]),
                ],
            },
        ],
        platoons: Vec::new(),
        transfers: Vec::new(),
    }
}

pub(crate) fn modular_plan() -> Plan {
    Plan {
        routes: vec![
            Route {
                vehicle: 0,
                stops: vec![
                    Stop::pass(1),
                    Stop::new(8, vec![Action::Pickup(0)]),
                    Stop::new(9, vec![Action::Join(0)]),
                    Stop::pass(15),
                    Stop::new(21, vec![Action::Split(0)]),
                    Stop::new(20, vec![Action::Dropoff(0)]),
                    Stop::new(19, vec![Action::Dropoff(1)]),
                ],
            },
            Route {
                vehicle: 1,
                stops: vec![
                    Stop::pass(6),
                    Stop::new(5, vec![Action::Pickup(2)]),
                    Stop::new(4, vec![Action::Pickup(1)]),
                    Stop::new(9, vec![Action::Join(0)]),
                    Stop::pass(15),
                    Stop::new(21, vec![Action::Split(0)]),
                    Stop::new(24, vec![Action::Dropoff(2)]),
                ],
            },
        ],
        platoons: vec![PlatoonSegment {
            id: 0,
            members: vec![0, 1],
            path: vec![9, 15, 21],
        }],
        transfers: vec![TransferRecord {
            request: 1,
            from: 1,
            to: 0,
            arc: (9, 15),
        }],
    }
}
