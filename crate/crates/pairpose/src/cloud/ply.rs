//! Minimal ASCII PLY reader shared by the mesh loader and the oriented
//! cloud reader.
//!
//! Only the subset of the format that those callers need is supported:
//! `format ascii 1.0`, scalar properties, and elements whose rows consist
//! of a single list property (the usual `vertex` / `face` layout). Binary
//! PLY and elements mixing scalar and list properties are rejected with a
//! line-numbered error.

/// One parsed element block: its declared name, the scalar property names
/// in declaration order, and the numeric rows.
///
/// For an element declared with a single list property, each row stores the
/// list values only (the leading count token is validated and dropped).
#[derive(Debug)]
pub(crate) struct PlyElement {
    pub name: String,
    pub scalar_names: Vec<String>,
    pub has_list: bool,
    pub rows: Vec<Vec<f64>>,
}

impl PlyElement {
    /// Index of a scalar property by name.
    pub fn scalar_index(&self, name: &str) -> Option<usize> {
        self.scalar_names.iter().position(|n| n == name)
    }
}

#[derive(Debug)]
pub(crate) struct AsciiPly {
    pub elements: Vec<PlyElement>,
}

impl AsciiPly {
    pub fn element(&self, name: &str) -> Option<&PlyElement> {
        self.elements.iter().find(|e| e.name == name)
    }
}

/// A parse failure with the 1-based line it occurred on.
#[derive(Debug)]
pub(crate) struct PlyError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, PlyError> {
    Err(PlyError { line, msg: msg.into() })
}

struct ElementDecl {
    name: String,
    count: usize,
    scalar_names: Vec<String>,
    has_list: bool,
}

/// Parses an ASCII PLY document.
pub(crate) fn parse_ascii_ply(text: &str) -> Result<AsciiPly, PlyError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let mut decls: Vec<ElementDecl> = Vec::new();

    match lines.next() {
        Some((_, "ply")) => {}
        Some((n, _)) => return err(n, "not a PLY file: missing `ply` magic"),
        None => return err(1, "empty file"),
    }

    let mut saw_format = false;
    let mut header_end = 0;
    for (n, line) in lines.by_ref() {
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("comment") | Some("obj_info") => {}
            Some("format") => {
                let kind = tok.next().unwrap_or("");
                if kind != "ascii" {
                    return err(n, format!("unsupported PLY format `{kind}`; only ascii is supported"));
                }
                saw_format = true;
            }
            Some("element") => {
                let name = match tok.next() {
                    Some(s) => s.to_owned(),
                    None => return err(n, "element declaration missing name"),
                };
                let count = match tok.next().map(str::parse::<usize>) {
                    Some(Ok(c)) => c,
                    _ => return err(n, "element declaration missing count"),
                };
                decls.push(ElementDecl { name, count, scalar_names: Vec::new(), has_list: false });
            }
            Some("property") => {
                let decl = match decls.last_mut() {
                    Some(d) => d,
                    None => return err(n, "property declared before any element"),
                };
                let ty = tok.next().unwrap_or("");
                if ty == "list" {
                    if decl.has_list || !decl.scalar_names.is_empty() {
                        return err(n, "elements with more than one property besides a list are not supported");
                    }
                    decl.has_list = true;
                } else {
                    if decl.has_list {
                        return err(n, "scalar property after a list property is not supported");
                    }
                    let name = match tok.last() {
                        Some(s) => s.to_owned(),
                        None => return err(n, "property declaration missing name"),
                    };
                    decl.scalar_names.push(name);
                }
            }
            Some("end_header") => {
                header_end = n;
                break;
            }
            Some(other) => return err(n, format!("unexpected header keyword `{other}`")),
            None => {}
        }
    }
    if header_end == 0 {
        return err(1, "missing end_header");
    }
    if !saw_format {
        return err(header_end, "missing format declaration");
    }

    let mut elements = Vec::with_capacity(decls.len());
    for decl in decls {
        let mut rows = Vec::with_capacity(decl.count);
        for _ in 0..decl.count {
            let (n, line) = match lines.next() {
                Some(pair) => pair,
                None => {
                    return err(
                        header_end,
                        format!("element `{}` declares {} rows but the file ends early", decl.name, decl.count),
                    )
                }
            };
            let mut values = Vec::new();
            for tok in line.split_whitespace() {
                match tok.parse::<f64>() {
                    Ok(v) => values.push(v),
                    Err(_) => return err(n, format!("invalid number `{tok}`")),
                }
            }
            if decl.has_list {
                let declared = match values.first() {
                    Some(&c) if c >= 0.0 && c.fract() == 0.0 => c as usize,
                    _ => return err(n, "list row must start with a non-negative integer count"),
                };
                if values.len() != declared + 1 {
                    return err(n, format!("list row declares {declared} values but has {}", values.len() - 1));
                }
                values.remove(0);
            } else if values.len() != decl.scalar_names.len() {
                return err(
                    n,
                    format!(
                        "element `{}` expects {} values per row, got {}",
                        decl.name,
                        decl.scalar_names.len(),
                        values.len()
                    ),
                );
            }
            rows.push(values);
        }
        elements.push(PlyElement {
            name: decl.name,
            scalar_names: decl.scalar_names,
            has_list: decl.has_list,
            rows,
        });
    }

    Ok(AsciiPly { elements })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_ELEMENTS: &str = "ply\n\
        format ascii 1.0\n\
        comment made by hand\n\
        element vertex 2\n\
        property float x\n\
        property float y\n\
        property float z\n\
        element face 1\n\
        property list uchar int vertex_indices\n\
        end_header\n\
        0 0 0\n\
        1 0.5 0\n\
        3 0 1 0\n";

    #[test]
    fn parses_vertices_and_faces() {
        let ply = parse_ascii_ply(TWO_ELEMENTS).unwrap();
        let vertex = ply.element("vertex").unwrap();
        assert_eq!(vertex.scalar_names, ["x", "y", "z"]);
        assert_eq!(vertex.rows, [[0.0, 0.0, 0.0], [1.0, 0.5, 0.0]]);
        assert_eq!(vertex.scalar_index("y"), Some(1));

        let face = ply.element("face").unwrap();
        assert!(face.has_list);
        assert_eq!(face.rows, [[0.0, 1.0, 0.0]]);
    }

    #[test]
    fn rejects_binary_format() {
        let text = "ply\nformat binary_little_endian 1.0\nend_header\n";
        let e = parse_ascii_ply(text).unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.msg.contains("ascii"));
    }

    #[test]
    fn reports_line_of_bad_number() {
        let text = TWO_ELEMENTS.replace("1 0.5 0", "1 oops 0");
        let e = parse_ascii_ply(&text).unwrap_err();
        assert_eq!(e.line, 12);
        assert!(e.msg.contains("oops"));
    }

    #[test]
    fn rejects_truncated_data() {
        let text = TWO_ELEMENTS.trim_end_matches("3 0 1 0\n");
        let e = parse_ascii_ply(text).unwrap_err();
        assert!(e.msg.contains("ends early"));
    }

    #[test]
    fn rejects_short_list_row() {
        let text = TWO_ELEMENTS.replace("3 0 1 0", "3 0 1");
        let e = parse_ascii_ply(&text).unwrap_err();
        assert_eq!(e.line, 13);
    }
}
