//! Bracketed constituency trees: parsing, traversal, and node surgery.
//!
//! Nodes live in an arena indexed by `usize`. Word tokens are leaf nodes;
//! a preterminal such as `(DT the)` is an internal node labeled `DT` with
//! one leaf child holding the word. Detaching a node unlinks it from its
//! parent but leaves it in the arena, so stored ids stay valid.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
struct NodeData {
    label: String,
    token: Option<String>,
    /// 0-based position of the word in the sentence; leaves only.
    word_index: Option<usize>,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// One parsed constituency tree.
#[derive(Clone, Debug)]
pub struct ParseTree {
    nodes: Vec<NodeData>,
    root: usize,
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    nodes: Vec<NodeData>,
    next_word: usize,
}

impl<'a> Parser<'a> {
    fn fail(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.as_bytes().get(self.pos).copied()
    }

    fn skip_spaces(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    /// Consumes characters up to the next space, parenthesis, or end.
    fn take_atom(&mut self) -> &'a str {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() || b == b'(' || b == b')' {
                break;
            }
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn parse_node(&mut self) -> Result<usize> {
        self.pos += 1; // past the opening parenthesis
        let label = self.take_atom().to_string();
        let id = self.nodes.len();
        self.nodes.push(NodeData {
            label,
            token: None,
            word_index: None,
            parent: None,
            children: Vec::new(),
        });
        loop {
            self.skip_spaces();
            match self.peek() {
                None => return Err(self.fail("unbalanced parentheses: node never closed")),
                Some(b')') => {
                    self.pos += 1;
                    return Ok(id);
                }
                Some(b'(') => {
                    let child = self.parse_node()?;
                    self.nodes[child].parent = Some(id);
                    self.nodes[id].children.push(child);
                }
                Some(_) => {
                    let token = self.take_atom().to_string();
                    let leaf = self.nodes.len();
                    self.nodes.push(NodeData {
                        label: String::new(),
                        token: Some(token),
                        word_index: Some(self.next_word),
                        parent: Some(id),
                        children: Vec::new(),
                    });
                    self.next_word += 1;
                    self.nodes[id].children.push(leaf);
                }
            }
        }
    }
}

/// Parses one tree in bracketed (Penn-style) notation, e.g.
/// `(S (NP (DT the) (NN cat)) (VP (VBD sat)))`. Words are numbered left to
/// right from 0.
pub fn parse_bracketed(text: &str) -> Result<ParseTree> {
    let mut parser = Parser {
        text,
        pos: 0,
        nodes: Vec::new(),
        next_word: 0,
    };
    parser.skip_spaces();
    match parser.peek() {
        Some(b'(') => {}
        Some(_) => return Err(parser.fail("expected '(' at start of tree")),
        None => return Err(parser.fail("empty input")),
    }
    let root = parser.parse_node()?;
    parser.skip_spaces();
    if parser.peek().is_some() {
        return Err(parser.fail("unexpected text after the closing parenthesis"));
    }
    Ok(ParseTree {
        nodes: parser.nodes,
        root,
    })
}

impl ParseTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn label(&self, id: usize) -> &str {
        &self.nodes[id].label
    }

    /// The word at a leaf; `None` for internal nodes.
    pub fn token(&self, id: usize) -> Option<&str> {
        self.nodes[id].token.as_deref()
    }

    pub fn word_index(&self, id: usize) -> Option<usize> {
        self.nodes[id].word_index
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].token.is_some()
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    /// Unlinks `id` from its parent. The node and its subtree stay in the
    /// arena but no longer appear in traversals from the root.
    pub fn detach(&mut self, id: usize) {
        if let Some(p) = self.nodes[id].parent.take() {
            self.nodes[p].children.retain(|&c| c != id);
        }
    }

    /// True when walking parent links from `id` reaches the root.
    pub fn is_attached(&self, id: usize) -> bool {
        let mut n = id;
        while let Some(p) = self.nodes[n].parent {
            n = p;
        }
        n == self.root
    }

    /// Leaf ids under `id`, left to right.
    pub fn leaves(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if self.is_leaf(n) {
                out.push(n);
            } else {
                stack.extend(self.nodes[n].children.iter().rev());
            }
        }
        out
    }

    /// All words of the tree in sentence order.
    pub fn leaf_surfaces(&self) -> Vec<&str> {
        self.leaves(self.root)
            .into_iter()
            .map(|id| self.nodes[id].token.as_deref().unwrap())
            .collect()
    }

    /// Internal (non-leaf) descendants of `id` in pre-order, excluding `id`
    /// itself.
    pub fn internal_descendants(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack: Vec<usize> = self.nodes[id]
            .children
            .iter()
            .rev()
            .filter(|&&c| !self.is_leaf(c))
            .copied()
            .collect();
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(
                self.nodes[n]
                    .children
                    .iter()
                    .rev()
                    .filter(|&&c| !self.is_leaf(c)),
            );
        }
        out
    }

    /// Labels of the internal children of `id`.
    pub fn internal_child_labels(&self, id: usize) -> Vec<&str> {
        self.nodes[id]
            .children
            .iter()
            .filter(|&&c| !self.is_leaf(c))
            .map(|&c| self.nodes[c].label.as_str())
            .collect()
    }

    fn render(&self, id: usize, out: &mut String) {
        let node = &self.nodes[id];
        if let Some(token) = &node.token {
            out.push_str(token);
            return;
        }
        out.push('(');
        out.push_str(&node.label);
        for &child in &node.children {
            out.push(' ');
            self.render(child, out);
        }
        out.push(')');
    }

    /// Canonical bracketed form (single spaces between siblings).
    pub fn to_bracketed(&self) -> String {
        let mut out = String::new();
        self.render(self.root, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAT: &str = "(S (NP (DT the) (NN cat)) (VP (VBD sat)) (. .))";

    #[test]
    fn parses_words_in_order() {
        let tree = parse_bracketed(CAT).unwrap();
        assert_eq!(tree.leaf_surfaces(), vec!["the", "cat", "sat", "."]);
        let indices: Vec<usize> = tree
            .leaves(tree.root())
            .into_iter()
            .map(|id| tree.word_index(id).unwrap())
            .collect();
        assert_eq!(indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn round_trips_canonical_form() {
        let tree = parse_bracketed(CAT).unwrap();
        assert_eq!(tree.to_bracketed(), CAT);
        let again = parse_bracketed(&tree.to_bracketed()).unwrap();
        assert_eq!(again.to_bracketed(), CAT);
    }

    #[test]
    fn tolerates_extra_whitespace_and_empty_root_label() {
        let tree = parse_bracketed("  ( (S (NN dog)) )  ").unwrap();
        assert_eq!(tree.label(tree.root()), "");
        assert_eq!(tree.leaf_surfaces(), vec!["dog"]);
    }

    #[test]
    fn reports_parse_errors_with_offsets() {
        let unclosed = parse_bracketed("(S (NP (DT the)");
        assert!(matches!(unclosed, Err(Error::Parse { .. })));
        let trailing = parse_bracketed("(S (NN dog)) extra");
        match trailing {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 13),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_bracketed("").is_err());
        assert!(parse_bracketed("no brackets").is_err());
    }

    #[test]
    fn preterminals_are_internal_nodes() {
        let tree = parse_bracketed(CAT).unwrap();
        let np = tree.children(tree.root())[0];
        assert_eq!(tree.label(np), "NP");
        assert_eq!(tree.internal_child_labels(np), vec!["DT", "NN"]);
        let dt = tree.children(np)[0];
        assert!(!tree.is_leaf(dt));
        assert!(tree.is_leaf(tree.children(dt)[0]));
    }

    #[test]
    fn detach_hides_subtree_from_traversal() {
        let mut tree = parse_bracketed(CAT).unwrap();
        let vp = tree.children(tree.root())[1];
        tree.detach(vp);
        assert_eq!(tree.leaf_surfaces(), vec!["the", "cat", "."]);
        assert!(!tree.is_attached(vp));
        assert!(tree.is_attached(tree.root()));
        assert_eq!(tree.to_bracketed(), "(S (NP (DT the) (NN cat)) (. .))");
    }

    #[test]
    fn internal_descendants_are_preorder_without_root() {
        let tree = parse_bracketed(CAT).unwrap();
        let labels: Vec<&str> = tree
            .internal_descendants(tree.root())
            .into_iter()
            .map(|id| tree.label(id))
            .collect();
        assert_eq!(labels, vec!["NP", "DT", "NN", "VP", "VBD", "."]);
    }
}
