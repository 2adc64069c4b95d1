//! Porter stemmer, implementing the original published rule tables: suffix
//! rules grouped into steps, each step applying its longest matching suffix
//! whose measure condition holds, with no fallthrough to shorter suffixes.

/// Condition a rule's stem must satisfy for the rewrite to fire.
#[derive(Clone, Copy)]
enum Cond {
    Always,
    MGt0,
    MGt1,
    MGt1EndsST,
}

impl Cond {
    fn holds(self, stem: &[u8]) -> bool {
        match self {
            Cond::Always => true,
            Cond::MGt0 => measure(stem) > 0,
            Cond::MGt1 => measure(stem) > 1,
            Cond::MGt1EndsST => {
                measure(stem) > 1 && matches!(stem.last(), Some(b's') | Some(b't'))
            }
        }
    }
}

type Rule = (&'static [u8], &'static [u8], Cond);

/// True when position `i` holds a consonant. `y` is a consonant at position
/// 0 and otherwise a consonant exactly when the previous letter is not.
fn is_cons(word: &[u8], i: usize) -> bool {
    match word[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_cons(word, i - 1),
        _ => true,
    }
}

/// The measure m: the number of vowel-consonant sequences in
/// `[C](VC)^m[V]`.
fn measure(stem: &[u8]) -> usize {
    let n = stem.len();
    let mut m = 0;
    let mut i = 0;
    while i < n && is_cons(stem, i) {
        i += 1;
    }
    loop {
        while i < n && !is_cons(stem, i) {
            i += 1;
        }
        if i >= n {
            break;
        }
        m += 1;
        while i < n && is_cons(stem, i) {
            i += 1;
        }
    }
    m
}

fn contains_vowel(stem: &[u8]) -> bool {
    (0..stem.len()).any(|i| !is_cons(stem, i))
}

fn ends_double_cons(word: &[u8]) -> bool {
    let n = word.len();
    n >= 2 && word[n - 1] == word[n - 2] && is_cons(word, n - 1)
}

/// True when the word ends consonant-vowel-consonant and the final
/// consonant is not `w`, `x`, or `y`.
fn ends_cvc(word: &[u8]) -> bool {
    let n = word.len();
    if n < 3 {
        return false;
    }
    is_cons(word, n - 3)
        && !is_cons(word, n - 2)
        && is_cons(word, n - 1)
        && !matches!(word[n - 1], b'w' | b'x' | b'y')
}

/// Applies the longest matching suffix rule from `rules`. The longest match
/// wins outright: if its condition fails, the word is returned unchanged
/// rather than trying a shorter suffix.
fn apply_rule_set(word: Vec<u8>, rules: &[Rule]) -> Vec<u8> {
    let mut best: Option<&Rule> = None;
    for rule in rules {
        if word.ends_with(rule.0) && best.is_none_or(|b| rule.0.len() > b.0.len()) {
            best = Some(rule);
        }
    }
    match best {
        Some(&(suffix, repl, cond)) => {
            let stem = &word[..word.len() - suffix.len()];
            if cond.holds(stem) {
                let mut out = stem.to_vec();
                out.extend_from_slice(repl);
                out
            } else {
                word
            }
        }
        None => word,
    }
}

const STEP1A: &[Rule] = &[
    (b"sses", b"ss", Cond::Always),
    (b"ies", b"i", Cond::Always),
    (b"ss", b"ss", Cond::Always),
    (b"s", b"", Cond::Always),
];

const STEP2: &[Rule] = &[
    (b"ational", b"ate", Cond::MGt0),
    (b"tional", b"tion", Cond::MGt0),
    (b"enci", b"ence", Cond::MGt0),
    (b"anci", b"ance", Cond::MGt0),
    (b"izer", b"ize", Cond::MGt0),
    (b"abli", b"able", Cond::MGt0),
    (b"alli", b"al", Cond::MGt0),
    (b"entli", b"ent", Cond::MGt0),
    (b"eli", b"e", Cond::MGt0),
    (b"ousli", b"ous", Cond::MGt0),
    (b"ization", b"ize", Cond::MGt0),
    (b"ation", b"ate", Cond::MGt0),
    (b"ator", b"ate", Cond::MGt0),
    (b"alism", b"al", Cond::MGt0),
    (b"iveness", b"ive", Cond::MGt0),
    (b"fulness", b"ful", Cond::MGt0),
    (b"ousness", b"ous", Cond::MGt0),
    (b"aliti", b"al", Cond::MGt0),
    (b"iviti", b"ive", Cond::MGt0),
    (b"biliti", b"ble", Cond::MGt0),
];

const STEP3: &[Rule] = &[
    (b"icate", b"ic", Cond::MGt0),
    (b"ative", b"", Cond::MGt0),
    (b"alize", b"al", Cond::MGt0),
    (b"iciti", b"ic", Cond::MGt0),
    (b"ical", b"ic", Cond::MGt0),
    (b"ful", b"", Cond::MGt0),
    (b"ness", b"", Cond::MGt0),
];

const STEP4: &[Rule] = &[
    (b"al", b"", Cond::MGt1),
    (b"ance", b"", Cond::MGt1),
    (b"ence", b"", Cond::MGt1),
    (b"er", b"", Cond::MGt1),
    (b"ic", b"", Cond::MGt1),
    (b"able", b"", Cond::MGt1),
    (b"ible", b"", Cond::MGt1),
    (b"ant", b"", Cond::MGt1),
    (b"ement", b"", Cond::MGt1),
    (b"ment", b"", Cond::MGt1),
    (b"ent", b"", Cond::MGt1),
    (b"ion", b"", Cond::MGt1EndsST),
    (b"ou", b"", Cond::MGt1),
    (b"ism", b"", Cond::MGt1),
    (b"ate", b"", Cond::MGt1),
    (b"iti", b"", Cond::MGt1),
    (b"ous", b"", Cond::MGt1),
    (b"ive", b"", Cond::MGt1),
    (b"ize", b"", Cond::MGt1),
];

fn step1a(word: Vec<u8>) -> Vec<u8> {
    apply_rule_set(word, STEP1A)
}

fn step1b(mut word: Vec<u8>) -> Vec<u8> {
    if word.ends_with(b"eed") {
        if measure(&word[..word.len() - 3]) > 0 {
            word.pop();
        }
        return word;
    }
    let removed = if word.ends_with(b"ed") && contains_vowel(&word[..word.len() - 2]) {
        word.truncate(word.len() - 2);
        true
    } else if word.ends_with(b"ing") && contains_vowel(&word[..word.len() - 3]) {
        word.truncate(word.len() - 3);
        true
    } else {
        false
    };
    if removed {
        if word.ends_with(b"at") || word.ends_with(b"bl") || word.ends_with(b"iz") {
            word.push(b'e');
        } else if ends_double_cons(&word) && !matches!(word.last(), Some(b'l') | Some(b's') | Some(b'z')) {
            word.pop();
        } else if measure(&word) == 1 && ends_cvc(&word) {
            word.push(b'e');
        }
    }
    word
}

fn step1c(mut word: Vec<u8>) -> Vec<u8> {
    if word.ends_with(b"y") && contains_vowel(&word[..word.len() - 1]) {
        word.pop();
        word.push(b'i');
    }
    word
}

fn step5a(mut word: Vec<u8>) -> Vec<u8> {
    if word.ends_with(b"e") {
        let stem = &word[..word.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            word.pop();
        }
    }
    word
}

fn step5b(mut word: Vec<u8>) -> Vec<u8> {
    if measure(&word) > 1 && ends_double_cons(&word) && word.ends_with(b"l") {
        word.pop();
    }
    word
}

/// Stems a lowercase word. Input containing anything other than ASCII
/// lowercase letters is returned unchanged, as is the empty string.
pub fn stem(word: &str) -> String {
    if word.is_empty() || !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return word.to_string();
    }
    let mut w = word.as_bytes().to_vec();
    w = step1a(w);
    w = step1b(w);
    w = step1c(w);
    w = apply_rule_set(w, STEP2);
    w = apply_rule_set(w, STEP3);
    w = apply_rule_set(w, STEP4);
    w = step5a(w);
    w = step5b(w);
    String::from_utf8(w).expect("stemming preserves ASCII")
}
