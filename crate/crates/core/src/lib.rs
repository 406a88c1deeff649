//! Global path planning for robots in semi-structured environments (garages,
//! campuses) over a unidirectional road network.
//!
//! Start and goal points in passages or parking areas are mapped onto the
//! network (including reverse lanes, which lets the robot cut across the road
//! right at the start or the goal) and joined by Dijkstra over the lane graph.
//! Points inside intersections are connected to the network through a grid
//! search over a two-layer potential map: inflated obstacles combined with a
//! Gaussian field centred on the lanes.

pub mod baselines;
pub mod bench;
pub mod geometry;
pub mod io;
pub mod mapping;
pub mod metrics;
pub mod netsearch;
pub mod planner;
pub mod potential;
pub mod roadnet;
