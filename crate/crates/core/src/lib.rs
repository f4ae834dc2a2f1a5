//! Combinatorics and invariant theory of the fibres of the moment map for a
//! parabolic nilradical of type A.
//!
//! A composition of `n` fixes a diagram of columns filled `1..=n` top to
//! bottom, left to right.  Around it the crate provides:
//!
//! - [`diagram`]: compositions, box positions, neighbouring pairs of columns
//!   and the nilradical coordinates `x_{i,j}`;
//! - [`tableau`]: tableaux with red entries, lines, and text/LaTeX rendering;
//! - [`component`]: enumeration of component tableaux, their Red Sets and
//!   excluded roots;
//! - [`reverse`]: reverse tableaux, built from a Red Set or branched along a
//!   sequence of pairs, with the standard and extreme shift modes;
//! - [`invariant`] and [`poly`]: the determinantal semi-invariant of each
//!   pair, evaluated symbolically, exactly or by a modular black box, and
//!   factorised into multilinear factors;
//! - [`geometry`]: covering and tangent-rank checks on root sets;
//! - [`verify`]: the property suite tying these together;
//! - [`cli`]: the `nilfibre` command line.
//!
//! ```
//! use nilfibre::component::enumerate_component_tableaux;
//! use nilfibre::diagram::Diagram;
//!
//! let d = Diagram::new("1,2,1,2".parse().unwrap());
//! let components = enumerate_component_tableaux(&d).unwrap();
//! assert_eq!(components.len(), 2);
//! ```

pub mod cli;
pub mod component;
pub mod diagram;
pub mod error;
pub mod geometry;
pub mod invariant;
pub mod poly;
pub mod reverse;
pub mod tableau;
pub mod verify;
