//! File formats: Wavefront OBJ with texture coordinates, ASCII MEDIT tet
//! meshes, and a binary multimesh archive.

mod archive;
mod medit;
mod obj;

use thiserror::Error;

use crate::error::MeshError;

pub use archive::{archive_from_bytes, archive_to_bytes, load_archive, save_archive, ARCHIVE_VERSION};
pub use medit::{load_medit, save_medit, MeditDocument};
pub use obj::{load_obj, save_obj, save_obj_mesh, ObjDocument, ObjMeshes};

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("archive version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("malformed archive: {0}")]
    Archive(String),
    #[error("refusing to save an empty mesh")]
    Empty,
    #[error("unsupported mesh: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse { line, msg: msg.into() }
}
