use std::fmt::Write as _;
use std::path::Path;

use super::{parse_err, IoError};
use crate::mesh::{Mesh, POSITION};
use crate::scalar::Scalar;

/// Contents of an ASCII MEDIT `.mesh` file. Indices are 0-based here and
/// 1-based on disk; every element carries its integer reference tag.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeditDocument {
    pub vertices: Vec<([f64; 3], i64)>,
    pub triangles: Vec<([usize; 3], i64)>,
    pub tetrahedra: Vec<([usize; 4], i64)>,
}

struct Tokens<'a> {
    toks: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let toks = text
            .lines()
            .enumerate()
            .flat_map(|(n, l)| l.split('#').next().unwrap_or("").split_whitespace().map(move |t| (n + 1, t)))
            .collect();
        Tokens { toks, at: 0 }
    }

    fn line(&self) -> usize {
        self.toks.get(self.at).or(self.toks.last()).map_or(0, |t| t.0)
    }

    fn next(&mut self) -> Option<&'a str> {
        let t = self.toks.get(self.at)?.1;
        self.at += 1;
        Some(t)
    }

    fn parse<X: std::str::FromStr>(&mut self, what: &str) -> Result<X, IoError> {
        let line = self.line();
        let t = self.next().ok_or_else(|| parse_err(line, format!("unexpected end of file, expected {what}")))?;
        t.parse().map_err(|_| parse_err(line, format!("bad {what} `{t}`")))
    }

    fn index(&mut self, count: usize) -> Result<usize, IoError> {
        let line = self.line();
        let i: usize = self.parse("vertex index")?;
        if i == 0 || i > count {
            return Err(parse_err(line, format!("vertex index {i} out of range (have {count})")));
        }
        Ok(i - 1)
    }
}

impl MeditDocument {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        let mut doc = MeditDocument::default();
        let mut t = Tokens::new(text);
        let mut ended = false;
        loop {
            let line = t.line();
            let Some(kw) = t.next() else { break };
            match kw {
                "MeshVersionFormatted" => {
                    let _: u32 = t.parse("version")?;
                }
                "Dimension" => {
                    let d: usize = t.parse("dimension")?;
                    if d != 3 {
                        return Err(parse_err(line, format!("unsupported dimension {d}")));
                    }
                }
                "Vertices" => {
                    let n: usize = t.parse("vertex count")?;
                    for _ in 0..n {
                        let p = [t.parse("coordinate")?, t.parse("coordinate")?, t.parse("coordinate")?];
                        doc.vertices.push((p, t.parse("reference")?));
                    }
                }
                "Triangles" => {
                    let n: usize = t.parse("triangle count")?;
                    for _ in 0..n {
                        let mut c = [0; 3];
                        for x in &mut c {
                            *x = t.index(doc.vertices.len())?;
                        }
                        doc.triangles.push((c, t.parse("reference")?));
                    }
                }
                "Tetrahedra" => {
                    let n: usize = t.parse("tetrahedron count")?;
                    for _ in 0..n {
                        let mut c = [0; 4];
                        for x in &mut c {
                            *x = t.index(doc.vertices.len())?;
                        }
                        doc.tetrahedra.push((c, t.parse("reference")?));
                    }
                }
                "End" => {
                    ended = true;
                    break;
                }
                other => return Err(parse_err(line, format!("unsupported section `{other}`"))),
            }
        }
        if !ended {
            return Err(parse_err(t.line(), "missing `End`"));
        }
        if doc.tetrahedra.is_empty() {
            return Err(parse_err(t.line(), "no tetrahedra"));
        }
        Ok(doc)
    }

    /// Tet mesh with 3D positions; triangles and reference tags are dropped.
    pub fn to_mesh<T: Scalar>(&self) -> Result<Mesh<T>, IoError> {
        let tets: Vec<[u32; 4]> = self.tetrahedra.iter().map(|(c, _)| c.map(|v| v as u32)).collect();
        let mut mesh = Mesh::new(3, self.vertices.len(), &tets)?;
        let data = self.vertices.iter().flat_map(|(p, _)| p.map(T::of)).collect();
        mesh.add_vertex_attribute(POSITION, 3, data)?;
        Ok(mesh)
    }

    /// Alive vertices and tets in id order, all tagged 0.
    pub fn from_mesh<T: Scalar>(mesh: &Mesh<T>) -> Result<Self, IoError> {
        if mesh.dim() != 3 {
            return Err(IoError::Unsupported(format!("MEDIT output holds tet meshes, got dimension {}", mesh.dim())));
        }
        if mesh.num_facets() == 0 {
            return Err(IoError::Empty);
        }
        if mesh.position_width() != Some(3) {
            return Err(IoError::Unsupported("tet mesh needs 3D positions".into()));
        }
        let mut doc = MeditDocument::default();
        let mut table = vec![usize::MAX; mesh.vertex_capacity()];
        for v in mesh.vertices() {
            table[v.index()] = doc.vertices.len();
            let p = mesh.position(v).unwrap();
            doc.vertices.push(([p[0].as_f64(), p[1].as_f64(), p[2].as_f64()], 0));
        }
        for f in mesh.facets() {
            let c = mesh.facet_vertices(f);
            doc.tetrahedra.push(([0, 1, 2, 3].map(|k| table[c[k].index()]), 0));
        }
        Ok(doc)
    }

    pub fn write(&self) -> String {
        let mut s = String::from("MeshVersionFormatted 2\nDimension 3\n");
        writeln!(s, "Vertices\n{}", self.vertices.len()).unwrap();
        for (p, r) in &self.vertices {
            writeln!(s, "{} {} {} {r}", p[0], p[1], p[2]).unwrap();
        }
        if !self.triangles.is_empty() {
            writeln!(s, "Triangles\n{}", self.triangles.len()).unwrap();
            for (c, r) in &self.triangles {
                writeln!(s, "{} {} {} {r}", c[0] + 1, c[1] + 1, c[2] + 1).unwrap();
            }
        }
        writeln!(s, "Tetrahedra\n{}", self.tetrahedra.len()).unwrap();
        for (c, r) in &self.tetrahedra {
            writeln!(s, "{} {} {} {} {r}", c[0] + 1, c[1] + 1, c[2] + 1, c[3] + 1).unwrap();
        }
        s.push_str("End\n");
        s
    }
}

pub fn load_medit<T: Scalar>(path: impl AsRef<Path>) -> Result<Mesh<T>, IoError> {
    MeditDocument::parse(&std::fs::read_to_string(path)?)?.to_mesh()
}

pub fn save_medit<T: Scalar>(mesh: &Mesh<T>, path: impl AsRef<Path>) -> Result<(), IoError> {
    std::fs::write(path, MeditDocument::from_mesh(mesh)?.write())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    const UNIT_TET: &str = "MeshVersionFormatted 2\nDimension 3\nVertices\n4\n0 0 0 0\n1 0 0 0\n0 1 0 0\n0 0 1 0\nTetrahedra\n1\n1 2 3 4 7\nEnd\n";

    #[test]
    fn unit_tet_round_trip() {
        let doc = MeditDocument::parse(UNIT_TET).unwrap();
        assert_eq!(doc.tetrahedra, vec![([0, 1, 2, 3], 7)]);
        let m: Mesh<f64> = doc.to_mesh().unwrap();
        let back = MeditDocument::from_mesh(&m).unwrap();
        assert_eq!(back.tetrahedra[0].0, doc.tetrahedra[0].0);
        let again: Mesh<f64> = MeditDocument::parse(&back.write()).unwrap().to_mesh().unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn tet_cube_round_trip_is_exact() {
        let m: Mesh<f64> = shapes::tet_cube(3, true);
        let text = MeditDocument::from_mesh(&m).unwrap().write();
        let back: Mesh<f64> = MeditDocument::parse(&text).unwrap().to_mesh().unwrap();
        assert_eq!(back, m.compacted().0);
    }

    #[test]
    fn malformed_sections_are_rejected() {
        let cases = [
            (UNIT_TET.replace("1 2 3 4 7", "1 2 3 5 7"), 11),
            (UNIT_TET.replace("End\n", ""), 11),
            (UNIT_TET.replace("Dimension 3", "Dimension 2"), 2),
            (UNIT_TET.replace("Tetrahedra", "Hexahedra"), 9),
            (UNIT_TET.replace("0 1 0 0", "0 one 0 0"), 7),
        ];
        for (text, line) in cases {
            match MeditDocument::parse(&text) {
                Err(IoError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("expected a parse error, got {other:?}"),
            }
        }
        let no_tets = "MeshVersionFormatted 2\nDimension 3\nVertices\n1\n0 0 0 0\nEnd\n";
        assert!(MeditDocument::parse(no_tets).is_err());
    }

    #[test]
    fn triangles_are_parsed() {
        let text = UNIT_TET.replace("Tetrahedra", "Triangles\n1\n1 2 3 5\nTetrahedra");
        let doc = MeditDocument::parse(&text).unwrap();
        assert_eq!(doc.triangles, vec![([0, 1, 2], 5)]);
        assert_eq!(MeditDocument::parse(&doc.write()).unwrap(), doc);
    }

    #[test]
    fn empty_and_surface_meshes_are_not_saved() {
        assert!(matches!(MeditDocument::from_mesh(&Mesh::<f64>::empty(3).unwrap()), Err(IoError::Empty)));
        assert!(matches!(MeditDocument::from_mesh(&shapes::icosphere::<f64>(0)), Err(IoError::Unsupported(_))));
    }
}
