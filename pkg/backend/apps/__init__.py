# apps/__init__.py
# core, dataset, glasso, graph, scoring, sgm, inference, removal, cli
