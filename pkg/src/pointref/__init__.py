"""Multimodal referring-expression resolution over probabilistic scene graphs.

An instruction like "pick up the black clipper beside this tool", together
with a pointing gesture, is compiled into a typed reasoning program and
executed step by step on a scene graph whose nodes carry attribute
distributions and whose edges carry spatial-relation distributions.
"""

__version__ = "0.1.0"
