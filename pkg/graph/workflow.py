"""LangGraph workflow definition."""
from typing import Literal

from langgraph.graph import END, START, StateGraph

from graph.state import RaceState
from stages.covariance_stage import covariance_stage
from stages.report_stage import report_stage
from stages.sampler_stage import sampler_stage
from stages.zero_stage import zero_stage
from utils.logger import setup_logger

logger = setup_logger(__name__)


def create_workflow() -> StateGraph:
    """Create the cov/mc LangGraph workflow."""

    # Initialize workflow
    workflow = StateGraph(RaceState)

    # Add nodes
    workflow.add_node("zeros", zero_stage.load_zeros)
    workflow.add_node("covariance", covariance_stage.build_matrix)
    workflow.add_node("sampler", sampler_stage.run_mc)
    workflow.add_node("formatter", report_stage.format_rows)

    # Gaussian runs with an explicit rho need no zero data
    def route_entry(state: RaceState) -> Literal["zeros", "covariance"]:
        if state["config"].rho is not None:
            return "covariance"
        return "zeros"

    workflow.add_conditional_edges(
        START,
        route_entry,
        {
            "zeros": "zeros",
            "covariance": "covariance"
        }
    )

    def after_zeros(state: RaceState) -> Literal["covariance", "end"]:
        if state.get("error"):
            return "end"
        return "covariance"

    workflow.add_conditional_edges(
        "zeros",
        after_zeros,
        {
            "covariance": "covariance",
            "end": END
        }
    )

    def after_covariance(state: RaceState) -> Literal["sampler", "formatter", "end"]:
        if state.get("error"):
            return "end"
        if state["config"].subcommand == "mc":
            return "sampler"
        return "formatter"

    workflow.add_conditional_edges(
        "covariance",
        after_covariance,
        {
            "sampler": "sampler",
            "formatter": "formatter",
            "end": END
        }
    )

    def after_sampler(state: RaceState) -> Literal["formatter", "end"]:
        if state.get("error"):
            return "end"
        return "formatter"

    workflow.add_conditional_edges(
        "sampler",
        after_sampler,
        {
            "formatter": "formatter",
            "end": END
        }
    )

    workflow.add_edge("formatter", END)

    return workflow.compile()


# Create compiled workflow
race_workflow = create_workflow()
