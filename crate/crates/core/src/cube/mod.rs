//! Configuration spaces of graphs as cube complexes, with the checks used to
//! confirm rank formulas and product structure by brute force.

mod complex;
mod config;
mod graph;
mod product;

pub use complex::{rational_rank, Cube, CubeComplex, HyperplaneReport, LinkProblem, LinkReport};
pub use config::{
    build_udn, build_udn_with, config_label, max_base_vertices, realize_grape, subdivide_for, subdivision_violation, Guard,
    MAX_CELLS,
};
pub use graph::SimpleGraph;
pub use product::{
    intersection_lemma_check, local_convexity_up2, maximal_products, maximal_products_with, twig_correspondence_check, up2,
    ConvexityReport, ProductPair, MAX_PRODUCT_EDGES,
};
