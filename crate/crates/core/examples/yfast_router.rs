use efset::YFastTrie;

fn main() {
    let mut trie = YFastTrie::for_universe(1 << 48);
    for (i, key) in [10u64, 1 << 20, 1 << 33, (1 << 47) + 5].into_iter().enumerate() {
        trie.insert(key, i);
    }
    println!("{} keys, width {}", trie.len(), trie.width());
    for x in [0, 11, 1 << 33, u64::MAX >> 16] {
        println!("pred({x}) = {:?}, succ({x}) = {:?}", trie.predecessor(x), trie.successor(x));
    }
    trie.remove(1 << 20);
    println!("after remove: {:?}", trie.iter().collect::<Vec<_>>());
    trie.check().unwrap();
}
