//! Strict parser for the HTML subset: html, head, title, body, h1-h6, p,
//! a (href), b, i, u, pre, br. Anything else is a parse error; attributes
//! other than href are ignored.

use std::collections::BTreeMap;

use super::InterpretError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HtmlNode {
    Element(HtmlElement),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HtmlElement {
    pub name: String,
    pub attrs: BTreeMap<String, String>,
    pub children: Vec<HtmlNode>,
    pub line: usize,
}

const KNOWN_TAGS: &[&str] = &[
    "html", "head", "title", "body", "h1", "h2", "h3", "h4", "h5", "h6", "p", "a", "b", "i", "u",
    "pre", "br",
];

pub fn is_block(name: &str) -> bool {
    matches!(
        name,
        "html" | "head" | "title" | "body" | "h1" | "h2" | "h3" | "h4" | "h5" | "h6" | "p" | "pre"
    )
}

fn err(line: usize, msg: impl Into<String>) -> InterpretError {
    InterpretError::HtmlParseError {
        line,
        msg: msg.into(),
    }
}

struct Parser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Parser<'a> {
    fn next_char(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    /// Read up to but not including `<`; returns the raw text.
    fn read_text(&mut self) -> String {
        let mut out = String::new();
        while let Some(&c) = self.chars.peek() {
            if c == '<' {
                break;
            }
            out.push(self.next_char().unwrap());
        }
        out
    }

    /// Read a tag starting at `<`. Returns (name, attrs, is_closing).
    fn read_tag(&mut self) -> Result<(String, BTreeMap<String, String>, bool), InterpretError> {
        let open_line = self.line;
        self.next_char(); // consume `<`
        let closing = if self.chars.peek() == Some(&'/') {
            self.next_char();
            true
        } else {
            false
        };
        let mut body = String::new();
        loop {
            match self.next_char() {
                None => return Err(err(open_line, "unterminated tag")),
                Some('>') => break,
                Some('<') => return Err(err(open_line, "nested `<` inside tag")),
                Some(c) => body.push(c),
            }
        }
        let mut parts = body.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| err(open_line, "empty tag"))?
            .to_ascii_lowercase();
        if !KNOWN_TAGS.contains(&name.as_str()) {
            return Err(err(open_line, format!("unknown tag: {name}")));
        }
        let mut attrs = BTreeMap::new();
        for attr in parts {
            if closing {
                return Err(err(open_line, "attributes on closing tag"));
            }
            let (key, value) = match attr.split_once('=') {
                Some((k, v)) => (k, v.trim_matches('"').to_string()),
                None => (attr, String::new()),
            };
            // Only href is meaningful in the subset; the rest is dropped.
            if key == "href" && name == "a" {
                attrs.insert("href".to_string(), value);
            }
        }
        Ok((name, attrs, closing))
    }
}

/// Parse an HTML document into a forest of top-level nodes.
pub fn parse_html(text: &str) -> Result<Vec<HtmlNode>, InterpretError> {
    let mut p = Parser {
        chars: text.chars().peekable(),
        line: 1,
    };
    // Stack of open elements; the sentinel collects top-level nodes.
    let mut stack: Vec<HtmlElement> = vec![HtmlElement {
        name: String::new(),
        attrs: BTreeMap::new(),
        children: Vec::new(),
        line: 0,
    }];

    loop {
        let text = p.read_text();
        if !text.is_empty() {
            stack
                .last_mut()
                .unwrap()
                .children
                .push(HtmlNode::Text(text));
        }
        if p.chars.peek().is_none() {
            break;
        }
        let tag_line = p.line;
        let (name, attrs, closing) = p.read_tag()?;
        if closing {
            let open = stack.pop().unwrap();
            if open.name.is_empty() {
                return Err(err(tag_line, format!("unmatched closing tag: {name}")));
            }
            if open.name != name {
                return Err(err(
                    tag_line,
                    format!("expected </{}>, found </{name}>", open.name),
                ));
            }
            stack
                .last_mut()
                .unwrap()
                .children
                .push(HtmlNode::Element(open));
        } else if name == "br" {
            stack
                .last_mut()
                .unwrap()
                .children
                .push(HtmlNode::Element(HtmlElement {
                    name,
                    attrs,
                    children: Vec::new(),
                    line: tag_line,
                }));
        } else {
            stack.push(HtmlElement {
                name,
                attrs,
                children: Vec::new(),
                line: tag_line,
            });
        }
    }

    if stack.len() != 1 {
        let open = stack.last().unwrap();
        return Err(err(open.line, format!("unclosed tag: {}", open.name)));
    }
    Ok(stack.pop().unwrap().children)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(node: &HtmlNode) -> &HtmlElement {
        match node {
            HtmlNode::Element(e) => e,
            HtmlNode::Text(t) => panic!("expected element, got text {t:?}"),
        }
    }

    #[test]
    fn nested_document_parses() {
        let nodes =
            parse_html("<html><head><title>My Title</title></head><body></body></html>").unwrap();
        assert_eq!(nodes.len(), 1);
        let html = elem(&nodes[0]);
        assert_eq!(html.name, "html");
        let head = elem(&html.children[0]);
        let title = elem(&head.children[0]);
        assert_eq!(title.children, vec![HtmlNode::Text("My Title".into())]);
    }

    #[test]
    fn href_kept_other_attrs_dropped() {
        let nodes = parse_html(r#"<a href="http://" class="x">t</a>"#).unwrap();
        let a = elem(&nodes[0]);
        assert_eq!(a.attrs.get("href").map(String::as_str), Some("http://"));
        assert!(!a.attrs.contains_key("class"));
    }

    #[test]
    fn unknown_tag_rejected_with_line() {
        let e = parse_html("<html>\n<script></script></html>").unwrap_err();
        assert_eq!(
            e,
            InterpretError::HtmlParseError {
                line: 2,
                msg: "unknown tag: script".into()
            }
        );
    }

    #[test]
    fn mismatched_nesting_rejected() {
        assert!(parse_html("<b><i>x</b></i>").is_err());
        assert!(parse_html("<p>x").is_err());
        assert!(parse_html("x</p>").is_err());
    }

    #[test]
    fn br_is_void() {
        let nodes = parse_html("<p>a<br>b</p>").unwrap();
        let p = elem(&nodes[0]);
        assert_eq!(p.children.len(), 3);
        assert_eq!(elem(&p.children[1]).name, "br");
    }
}
