use std::collections::HashMap;

/// String-to-id table. Ids are assigned in insertion order, so a vocabulary
/// built from the same data in the same order is always identical.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocab {
    items: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocab {
    /// A vocabulary pre-populated with reserved entries (ids 0, 1, ...).
    pub fn with_reserved(reserved: &[&str]) -> Self {
        let mut v = Vocab::default();
        for r in reserved {
            v.insert(r);
        }
        v
    }

    pub fn from_items(items: Vec<String>) -> Self {
        let index = items
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Vocab { items, index }
    }

    pub fn insert(&mut self, item: &str) -> usize {
        if let Some(&id) = self.index.get(item) {
            return id;
        }
        let id = self.items.len();
        self.items.push(item.to_owned());
        self.index.insert(item.to_owned(), id);
        id
    }

    pub fn get(&self, item: &str) -> Option<usize> {
        self.index.get(item).copied()
    }

    /// Id of `item`, or `fallback` when unknown.
    pub fn id_or(&self, item: &str, fallback: usize) -> usize {
        self.get(item).unwrap_or(fallback)
    }

    pub fn item(&self, id: usize) -> &str {
        &self.items[id]
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reserved_ids_come_first() {
        let mut v = Vocab::with_reserved(&["<null>", "<unk>"]);
        assert_eq!(v.insert("cat"), 2);
        assert_eq!(v.insert("<unk>"), 1);
        assert_eq!(v.id_or("dog", 1), 1);
        assert_eq!(Vocab::from_items(v.items().to_vec()), v);
    }
}
