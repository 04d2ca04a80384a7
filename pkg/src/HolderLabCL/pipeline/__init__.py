from .runner import ANCHORS, PipelineBundle, run_pipeline, solve_instance
