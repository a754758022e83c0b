//! Reader for the parenthesized `.dis` tree format.

use super::rst_json::check;
use super::IngestError;
use crate::model::{validate_tree_in, CharSpan, NodeSpec, Nuclearity, Rel2Par, RstTree};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open(usize),
    Close(usize),
    Atom(usize, String),
    Text(usize, String),
}

impl Tok {
    fn offset(&self) -> usize {
        match self {
            Tok::Open(o) | Tok::Close(o) | Tok::Atom(o, _) | Tok::Text(o, _) => *o,
        }
    }
}

fn lex(src: &str) -> Result<Vec<Tok>, IngestError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut depth = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            depth += 1;
            out.push(Tok::Open(i));
            i += 1;
        } else if c == ')' {
            if depth == 0 {
                return Err(IngestError::DisSyntax {
                    offset: i,
                    message: "unbalanced parenthesis".into(),
                });
            }
            depth -= 1;
            out.push(Tok::Close(i));
            i += 1;
        } else if c == '_' && chars.get(i + 1) == Some(&'!') {
            let start = i;
            let mut j = i + 2;
            while j + 1 < chars.len() && !(chars[j] == '!' && chars[j + 1] == '_') {
                j += 1;
            }
            if j + 1 >= chars.len() {
                return Err(IngestError::DisSyntax {
                    offset: start,
                    message: "unterminated text payload".into(),
                });
            }
            out.push(Tok::Text(start, chars[i + 2..j].iter().collect()));
            i = j + 2;
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
                i += 1;
            }
            out.push(Tok::Atom(start, chars[start..i].iter().collect()));
        }
    }
    if depth != 0 {
        return Err(IngestError::DisSyntax {
            offset: chars.len(),
            message: "unbalanced parenthesis".into(),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    text: &'a [char],
    cursor: usize,
    edu_count: u32,
}

enum Extent {
    Span(u32, u32),
    Leaf(u32),
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: &str) -> Result<T, IngestError> {
        let offset = self.toks.get(self.pos).map(Tok::offset).unwrap_or(0);
        Err(IngestError::DisSyntax {
            offset,
            message: message.to_string(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expect_open(&mut self) -> Result<(), IngestError> {
        match self.next() {
            Some(Tok::Open(_)) => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected '('")
            }
        }
    }

    fn expect_close(&mut self) -> Result<(), IngestError> {
        match self.next() {
            Some(Tok::Close(_)) => Ok(()),
            _ => {
                self.pos -= 1;
                self.err("expected ')'")
            }
        }
    }

    fn atom(&mut self) -> Result<String, IngestError> {
        match self.next() {
            Some(Tok::Atom(_, a)) => Ok(a),
            _ => {
                self.pos -= 1;
                self.err("expected a token")
            }
        }
    }

    fn int(&mut self) -> Result<u32, IngestError> {
        let a = self.atom()?;
        a.parse().or_else(|_| {
            self.pos -= 1;
            self.err("expected an integer")
        })
    }

    /// Keyword of the attribute list starting at the current `(`, if any.
    fn peek_keyword(&self) -> Option<&str> {
        match (self.toks.get(self.pos), self.toks.get(self.pos + 1)) {
            (Some(Tok::Open(_)), Some(Tok::Atom(_, a))) => Some(a),
            _ => None,
        }
    }

    fn node(&mut self) -> Result<NodeSpec, IngestError> {
        self.expect_open()?;
        let role = self.atom()?;
        let nuclearity = match role.as_str() {
            "Root" => Nuclearity::Root,
            "Nucleus" => Nuclearity::Nucleus,
            "Satellite" => Nuclearity::Satellite,
            _ => {
                self.pos -= 1;
                return self.err("expected Root, Nucleus or Satellite");
            }
        };
        self.expect_open()?;
        let extent = match self.atom()?.as_str() {
            "span" => Extent::Span(self.int()?, self.int()?),
            "leaf" => Extent::Leaf(self.int()?),
            _ => {
                self.pos -= 1;
                return self.err("expected (span a b) or (leaf n)");
            }
        };
        self.expect_close()?;
        let mut rel2par = Rel2Par::Span;
        if self.peek_keyword() == Some("rel2par") {
            self.pos += 2;
            rel2par = Rel2Par::parse(&self.atom()?);
            self.expect_close()?;
        }
        let mut spec = match extent {
            Extent::Leaf(n) => {
                if self.peek_keyword() != Some("text") {
                    return self.err("leaf without (text _!...!_)");
                }
                self.pos += 2;
                let payload = match self.next() {
                    Some(Tok::Text(_, p)) => p,
                    _ => {
                        self.pos -= 1;
                        return self.err("expected _!...!_ payload");
                    }
                };
                self.expect_close()?;
                self.edu_count += 1;
                if n != self.edu_count {
                    return self.err(&format!("leaf {n} out of sequence, expected {}", self.edu_count));
                }
                let span = self.locate(n, &payload)?;
                NodeSpec::leaf(span, nuclearity, "span", n)
            }
            Extent::Span(a, b) => {
                let mut children = Vec::new();
                while let Some(Tok::Open(_)) = self.peek() {
                    children.push(self.node()?);
                }
                if children.is_empty() {
                    return self.err("span node without children");
                }
                let first = self.edu_count + 1 - count_leaves(&children);
                if first != a || self.edu_count != b {
                    return Err(IngestError::Semantic(format!(
                        "span ({a} {b}) does not match its leaves {first}..{}",
                        self.edu_count
                    )));
                }
                NodeSpec::internal(nuclearity, "span", children)
            }
        };
        spec.rel2par = rel2par;
        self.expect_close()?;
        Ok(spec)
    }

    fn locate(&mut self, edu: u32, payload: &str) -> Result<CharSpan, IngestError> {
        let payload = payload.replace("<P>", " ");
        let words: Vec<Vec<char>> = payload.split_whitespace().map(|w| w.chars().collect()).collect();
        if words.is_empty() {
            return Err(IngestError::Semantic(format!("EDU {edu} has empty text")));
        }
        match find_words(self.text, &words, self.cursor) {
            Some((s, e)) => {
                self.cursor = e;
                Ok(CharSpan::new(s, e).expect("non-empty match"))
            }
            None => Err(IngestError::EduTextNotFound {
                edu,
                text: payload.trim().to_string(),
            }),
        }
    }
}

fn count_leaves(children: &[NodeSpec]) -> u32 {
    children
        .iter()
        .map(|c| if c.children.is_empty() { 1 } else { count_leaves(&c.children) })
        .sum()
}

/// Earliest match at or after `from` of the words in order, separated by any
/// run of whitespace in the text.
fn find_words(text: &[char], words: &[Vec<char>], from: usize) -> Option<(usize, usize)> {
    let first = &words[0];
    let mut start = from;
    while start + first.len() <= text.len() {
        if text[start..start + first.len()] == first[..] {
            let mut pos = start + first.len();
            let mut ok = true;
            for w in &words[1..] {
                let ws = pos;
                while pos < text.len() && text[pos].is_whitespace() {
                    pos += 1;
                }
                if pos == ws || pos + w.len() > text.len() || text[pos..pos + w.len()] != w[..] {
                    ok = false;
                    break;
                }
                pos += w.len();
            }
            if ok {
                return Some((start, pos));
            }
        }
        start += 1;
    }
    None
}

/// Parses a `.dis` tree, recovering leaf offsets from the document text.
pub fn parse_rst_dis(bytes: &[u8], text: &str) -> Result<RstTree, IngestError> {
    let src = std::str::from_utf8(bytes).map_err(|e| IngestError::DisSyntax {
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    let chars: Vec<char> = text.chars().collect();
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        text: &chars,
        cursor: 0,
        edu_count: 0,
    };
    let root = p.node()?;
    if p.pos < p.toks.len() {
        return p.err("trailing content after root node");
    }
    let tree = RstTree::from_spec(&root);
    check(validate_tree_in(&tree, &chars))?;
    Ok(tree)
}

/// Writes a tree in `.dis` form, taking leaf payloads from `text`.
pub fn serialize_rst_dis(tree: &RstTree, text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::new();
    write_node(tree, tree.root(), &chars, 0, &mut out);
    out
}

fn write_node(tree: &RstTree, id: usize, text: &[char], indent: usize, out: &mut String) {
    let node = tree.node(id);
    let role = match node.nuclearity {
        Nuclearity::Root => "Root",
        Nuclearity::Nucleus => "Nucleus",
        Nuclearity::Satellite => "Satellite",
    };
    out.push_str(&" ".repeat(indent));
    out.push_str("( ");
    out.push_str(role);
    match node.edu_id {
        Some(edu) => out.push_str(&format!(" (leaf {edu})")),
        None => {
            let edus: Vec<u32> = tree.leaves_under(id).filter_map(|l| tree.node(l).edu_id).collect();
            out.push_str(&format!(" (span {} {})", edus[0], edus[edus.len() - 1]));
        }
    }
    if node.nuclearity != Nuclearity::Root {
        out.push_str(&format!(" (rel2par {})", node.rel2par));
    }
    if node.is_leaf() {
        let payload: String = text[node.span.start()..node.span.end()].iter().collect();
        out.push_str(&format!(" (text _!{}!_) )\n", payload.trim()));
        return;
    }
    out.push('\n');
    for &c in &node.children {
        write_node(tree, c, text, indent + 2, out);
    }
    out.push_str(&" ".repeat(indent));
    out.push_str(")\n");
}
