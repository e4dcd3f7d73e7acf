//! Images of boundary cylinders and double cylinders of a free group under
//! automorphisms.
//!
//! The boundary `∂F` of a free group `F(A)` is the set of infinite reduced
//! words. The cylinder `C¹_u` collects those that start with `u`, and a
//! finite union of cylinders is a [`MultiCylinder`]. An automorphism `φ`
//! maps multi-cylinders to multi-cylinders; [`dual_map`] computes the unique
//! minimal index set of `φ(C¹_u)`. The [`double`] module does the same for
//! pairs of boundary points, and [`oracle`] certifies results by independent
//! finite-depth enumeration.
//!
//! ```
//! use freecyl::{dual_map, Alphabet, Automorphism, Word};
//!
//! let a = Alphabet::new(2).unwrap();
//! let w = |s: &str| s.parse::<Word>().unwrap();
//! let phi = Automorphism::new(a, vec![w("aba"), w("ba")], vec![w("aB"), w("bbA")]).unwrap();
//! let image = dual_map(&phi, &w("ba")).unwrap();
//! assert!(image.len() > 1);
//! ```

pub mod automorphism;
pub mod double;
pub mod error;
pub mod exec;
pub mod image;
pub mod multicyl;
pub mod oracle;
pub mod words;

pub use automorphism::{
    certified_cancellation, empirical_cancellation, tight_cancellation, Automorphism,
    CancellationBounds, Defects, EmpiricalDefects,
};
pub use double::{
    double_image, double_image_closed, is_rectangle, split_unit, translate, RectanglePair,
    RectangleUnion,
};
pub use error::{Error, Result};
pub use exec::{Budget, Execution};
pub use image::{dual_map, dual_map_set, image_adaptive, image_formula, plan, ImageConstants};
pub use multicyl::{Move, MultiCylinder};
pub use words::{Alphabet, Letter, Word};
