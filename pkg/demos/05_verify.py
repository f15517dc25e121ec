"""Independent checks of a finished triple system."""
from girth_triples import PASCH, enumerate_obstructions, init_process, run_to_completion
from girth_triples.observables import girth_check_patterns, girth_check_subsets, verify_triple_system

res = run_to_completion(init_process(36, 7, seed=0))
print("subset search, girth > 7:", girth_check_subsets(res.triples, 7))
print("pattern search, girth > 7:", girth_check_patterns(res.triples, enumerate_obstructions(7)))

# a Pasch configuration has girth 6 exactly
print(verify_triple_system(PASCH, 5)["girth_ok"], verify_triple_system(PASCH, 6)["girth_ok"])
