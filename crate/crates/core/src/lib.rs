//! Finite lattices, lattice schemes and Singleton-type bounds.
//!
//! ```
//! use lattice_sb::bounds::{lsb, BoundParams};
//! use lattice_sb::families::build_projective_lattice;
//! use lattice_sb::oracle::{max_code, SearchProblem};
//!
//! let sub = build_projective_lattice(2, 2).unwrap();
//! assert!(sub.lattice.is_modular() && !sub.lattice.is_distributive());
//!
//! let bound = lsb(&BoundParams::projective(2, 2, 2).unwrap());
//! let best = max_code(&SearchProblem::new(&sub.lattice, 2)).unwrap();
//! assert_eq!(bound, 5u32.into());
//! assert_eq!(best.best_size, 3);
//! ```

mod bits;
pub mod bounds;
pub mod counting;
pub mod families;
pub mod fq;
pub mod lattice;
pub mod oracle;
pub mod report;
pub mod schemes;

pub use counting::BigNat;
pub use lattice::{ElemId, Lattice, LatticeError, Valuation};
