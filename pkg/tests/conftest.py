"""fixtures shared across test modules."""

# list reversal over short lists of small ints.  loads in well under a
# second and synthesizes a best conjunction in a few hundred milliseconds,
# so loader and command-line tests lean on it heavily.
REVERSE_SRC = """
(problem
  (bounds (list-len 3) (int-range 0 2))

  (define (reverse (l list))
    (match l
      (nil nil)
      ((cons hd tl) (snoc (reverse tl) hd))))
  (define (snoc (l list) (x int))
    (match l
      (nil (cons x nil))
      ((cons hd tl) (cons hd (snoc tl x)))))

  (generator (gen-int) (choose-int 0 2))
  (generator (gen-list) (choose nil (cons (gen-int) (gen-list))))

  (var l1 (gen-list))
  (var ol1 (gen-list))

  (query (ol1 (reverse l1)))

  (grammar
    (start B)
    (nt B (depth 1) true A (or A A) (or A A A))
    (nt A (depth 2) (= I I) (> I I) (eq l1 ol1))
    (nt I (depth 2) (len l1) (len ol1) (alt 0 1 2))))
"""


def write_spq(tmp_path, text, name="prob.spq"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)
