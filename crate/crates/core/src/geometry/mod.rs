//! Concrete geometry: targets, the pinhole camera, rendering, bitmaps and
//! 2-D polytopes.

pub mod builtin;
pub mod camera;
pub mod image;
pub mod polytope;
pub mod raster;
pub mod refpoint;
pub mod target;

pub use builtin::{builtin, BUILTIN_NAMES};
pub use camera::{project, rotation_matrix, CameraParams, Mat3, Pose};
pub use image::BinaryImage;
pub use polytope::{
    convex_hull_points, convex_hull_vertices, polytope_box_overlap_outer, ConvexPolygon2,
    HPolytope2, Point2,
};
pub use raster::{polygon_pixel_intersect, rasterize, render, render_with_edges};
pub use refpoint::refpoint_reconstruct;
pub use target::{ConvexPolygon3, Point3, Target};
